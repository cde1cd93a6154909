import hashlib
import io

from src.utils.file_utils import atomic_write_csv
from src.utils.file_utils import atomic_write_json
from src.utils.file_utils import atomic_write_text
from src.utils.file_utils import get_file_hash
from src.utils.service_status import get_runtime_status
from src.utils.service_status import worker_count


def test_get_file_hash_path_and_stream(tmp_path):
    path = tmp_path / "a.txt"
    path.write_bytes(b"kobayashi")
    expected = hashlib.sha256(b"kobayashi").hexdigest()
    assert get_file_hash(path) == expected

    stream = io.BytesIO(b"kobayashi")
    assert get_file_hash(stream) == expected
    assert stream.read() == b"kobayashi"


def test_atomic_write_text_with_digest(tmp_path):
    path = atomic_write_text(tmp_path / "sub" / "out.txt", "hello\n", digest=True)
    assert path.read_text() == "hello\n"
    expected = hashlib.sha256("hello\n".encode()).hexdigest()
    assert (tmp_path / "sub" / "out.txt.sha256").read_text() == f"{expected}  out.txt\n"
    assert not list((tmp_path / "sub").glob("*.tmp"))


def test_atomic_write_json_is_sorted(tmp_path):
    path = atomic_write_json(tmp_path / "s.json", {"b": 1, "a": [1.5]})
    assert path.read_text() == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'


def test_atomic_write_csv_values(tmp_path):
    rows = [{"x": 0.1, "y": None, "z": True}, {"x": 1 / 3, "y": "oracle"}]
    path = atomic_write_csv(tmp_path / "r.csv", ["x", "y", "z"], rows)
    assert path.read_text().splitlines() == ["x,y,z", "0.1,,True", f"{1 / 3!r},oracle,"]


def test_worker_count_bounds():
    assert worker_count(0) == 1
    assert worker_count(1) == 1
    assert worker_count() >= 1


def test_runtime_status_keys():
    status = get_runtime_status()
    assert {"lempertkit", "numpy", "scipy", "python", "threads"} <= set(status)

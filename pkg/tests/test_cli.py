import base64
import json

import numpy as np
import pytest

from qencode.cli import main
from qencode.mps import mps_decompose

from qasm_interp import simulate_qasm


def test_encode_inline_qasm(capsys):
    assert main(["encode", '{"pattern":"sparse","entries":[[19,1.0]]}', "-N", "64"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("OPENQASM 2.0;")
    assert out.count("u3(") == 3
    assert np.argmax(np.abs(simulate_qasm(out))) == 19


def test_encode_file_json_and_outputs(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"pattern": "walsh", "k": 1, "c0": 1.0, "c1": {"re": 0, "im": 2}}))
    qasm, info = tmp_path / "o.qasm", tmp_path / "o.json"
    rc = main(["encode", str(spec), "-N", "8", "--emit", "json", "--validate", "--qasm-out", str(qasm), "--info-out", str(info)])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pattern_name"] == "WALSH" and doc["validated"] is True
    assert json.loads(info.read_text()) == doc
    assert qasm.read_text().startswith("OPENQASM")


def test_counts_emit(capsys):
    assert main(["encode", '{"pattern":"hamming","r":0.5}', "-N", "16", "--emit", "counts", "--seed", "3"]) == 0
    counts = json.loads(capsys.readouterr().out)
    assert set(counts) == {"gate_count", "gate_count_1q", "gate_count_2q", "circuit_depth"}


def test_malformed_json_is_usage_error(tmp_path, capsys):
    out = tmp_path / "x.qasm"
    assert main(["encode", '{"pattern": "step", ', "-N", "8", "--qasm-out", str(out)]) == 2
    assert "malformed JSON" in capsys.readouterr().err
    assert not out.exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["encode", '{"pattern":"step","k_e":99}', "-N", "8"],
        ["encode", '{"pattern":"step","k_e":3}', "-N", "6"],
        ["encode", '{"pattern":"bogus"}', "-N", "8"],
        ["encode", "missing.json", "-N", "8"],
        ["encode", '{"pattern":"step","k_e":3}'],
        ["frobnicate"],
        ["mps", "--bond-dim", "2"],
        ["predict", '{"pattern":"partition","parts":[{"pattern":"hamming","r":0.5}]}', "-N", "8"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_validation_failure_exit_code(tmp_path, capsys):
    v = tmp_path / "g.csv"
    i = np.arange(256)
    v.write_text("\n".join(str(x) for x in np.exp(-50 * ((i - 128) / 256) ** 2)))
    assert main(["mps", str(v), "--bond-dim", "4", "--validate", "--emit", "none"]) == 1
    assert "validation failed" in capsys.readouterr().err
    assert main(["mps", str(v), "--bond-dim", "8", "--validate", "--emit", "none"]) == 0


def test_predict(capsys):
    assert main(["predict", '{"pattern":"polynomial","coeffs":[0,1]}', "-N", "4096"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["m"] == 12 and doc["exact"] is True


def test_mps_formats(tmp_path, capsys):
    rng = np.random.default_rng(0)
    v = rng.normal(size=16)
    (tmp_path / "v.bin").write_bytes(v.astype("<f8").tobytes())
    (tmp_path / "v.json").write_text(json.dumps([float(x) for x in v[:8]] + [{"re": 0.1, "im": 0.2}]))
    (tmp_path / "v.csv").write_text("# header\n1,0\n0,1\n2\n")
    for name in ("v.bin", "v.json", "v.csv"):
        assert main(["mps", str(tmp_path / name), "--bond-dim", "8", "--validate"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["pattern_name"] == "MPS" and doc["validated"]
    (tmp_path / "bad.csv").write_text("1,2,3\n")
    assert main(["mps", str(tmp_path / "bad.csv"), "--bond-dim", "2"]) == 2
    (tmp_path / "bad.bin").write_bytes(b"1234567")
    assert main(["mps", str(tmp_path / "bad.bin"), "--bond-dim", "2"]) == 2


def test_mps_tensors_in(tmp_path, capsys):
    v = np.cos(np.arange(32) / 5.0)
    tensors, _ = mps_decompose(v, 4)
    items = []
    for j, a in enumerate(tensors.sites):
        if j % 2:
            items.append({"shape": list(a.shape), "b64": base64.b64encode(a.astype("<c16").tobytes()).decode()})
        else:
            items.append({"shape": list(a.shape), "re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist()})
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"tensors": items}))
    assert main(["mps", "--tensors-in", str(path), "--validate"]) == 0
    assert json.loads(capsys.readouterr().out)["validated"]
    path.write_text(json.dumps({"tensors": [{"shape": [1, 2]}]}))
    assert main(["mps", "--tensors-in", str(path)]) == 2


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run(
        [sys.executable, "-m", "qencode", "encode", '{"pattern":"step","k_e":4}', "-N", "8", "--emit", "counts"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and json.loads(res.stdout)["gate_count_1q"] >= 1
    bad = subprocess.run([sys.executable, "-m", "qencode", "encode", "{", "-N", "8"], capture_output=True, text=True)
    assert bad.returncode == 2

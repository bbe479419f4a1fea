import csv
import importlib.util
from pathlib import Path

import pytest

from declare_variants.synthetic import SyntheticConfig, generate_variants

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def load_script(name):
    spec = importlib.util.spec_from_file_location(name, SCRIPTS / f"{name}.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def test_sizes_and_determinism():
    cfg = SyntheticConfig(traces_a=500, traces_b=300, activities=5, distinct=20, seed=3)
    a, b = generate_variants(cfg)
    assert (len(a), len(b)) == (500, 300)
    assert generate_variants(cfg) == (a, b)
    assert a.alphabet | b.alphabet <= {f"act_{i:02d}" for i in range(5)}
    assert len(a.traces) <= 20 and all(len(t) >= 2 for t in a.traces)


def test_config_validation():
    with pytest.raises(ValueError):
        SyntheticConfig(traces_a=0)
    with pytest.raises(ValueError):
        SyntheticConfig(shift=1.5)


def test_split_script(tmp_path):
    xes = tmp_path / "log.xes"
    xes.write_text(
        """<log>
  <trace><string key="concept:name" value="1"/><int key="Age" value="80"/>
    <event><string key="concept:name" value="a"/></event><event><string key="concept:name" value="b"/></event></trace>
  <trace><string key="concept:name" value="2"/>
    <event><string key="concept:name" value="a"/><int key="Age" value="30"/></event></trace>
  <trace><string key="concept:name" value="3"/><int key="Age" value="50"/>
    <event><string key="concept:name" value="c"/></event></trace>
</log>"""
    )
    split = load_script("split_variants")
    assert split.main([str(xes), "--attribute", "Age", "--a", ">=70", "--b", "<=35", "--out-dir", str(tmp_path)]) == 0
    with open(tmp_path / "variant_a.csv", newline="") as fh:
        assert [r["activity"] for r in csv.DictReader(fh)] == ["a", "b"]
    with open(tmp_path / "variant_b.csv", newline="") as fh:
        assert [r["activity"] for r in csv.DictReader(fh)] == ["a"]

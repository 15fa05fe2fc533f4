import json

import pytest

from psi_lab.basis import IndexWindow
from psi_lab.bells import make_meyer
from psi_lab.config import (ConfigError, RunConfig, check_int, check_interval, check_positive,
                            check_window, resolve_bell)


def test_defaults_validate():
    cfg = RunConfig().validate()
    assert cfg.index_window == IndexWindow(-4, 4, 64)
    assert cfg.profile.kind == "meyer"
    assert RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_from_dict_merges_nested():
    cfg = RunConfig.from_dict({"window": {"kmax": 8}, "grids": {"T": 10}})
    assert cfg.window == {"jmin": -4, "jmax": 4, "kmax": 8}
    assert cfg.grids["T"] == 10 and cfg.grids["n"] == [0, 1, 2, 3, 4]
    with pytest.raises(ConfigError, match="unknown"):
        RunConfig.from_dict({"windw": {}})


@pytest.mark.parametrize("change, field", [
    ({"window": {"jmin": 1, "jmax": 0, "kmax": 2}}, "window"),
    ({"window": {"jmin": 0, "jmax": 1}}, "window"),
    ({"window": {"jmin": 0.5, "jmax": 1, "kmax": 2}}, "window.jmin"),
    ({"tol": 0}, "tol"),
    ({"tol": "x"}, "tol"),
    ({"format": "xml"}, "format"),
    ({"grids": {"lambda": []}}, "grids.lambda"),
    ({"grids": {"lambda": [1.0, float("nan")]}}, "grids.lambda"),
    ({"grids": {"n": [-1]}}, "grids.n"),
    ({"grids": {"T": 2}}, "grids.T"),
    ({"threads": 0}, "threads"),
    ({"bell": "haar"}, "bell"),
])
def test_field_level_messages(change, field):
    cfg = RunConfig(**{**RunConfig().to_dict(), **change})
    with pytest.raises(ConfigError) as exc:
        cfg.validate()
    assert str(exc.value).startswith(field)


def test_checkers():
    assert check_int("a", 3.0) == 3
    with pytest.raises(ConfigError):
        check_int("a", True)
    assert check_positive("b", "2.5") == 2.5
    with pytest.raises(ConfigError):
        check_positive("b", float("inf"))
    assert check_window(0, 0, 0) == IndexWindow(0, 0, 0)
    with pytest.raises(ConfigError):
        check_window(0, 0, -1)
    assert check_interval("K", [1, 2]) == (1.0, 2.0)
    with pytest.raises(ConfigError):
        check_interval("K", [0, 1])
    with pytest.raises(ConfigError):
        check_interval("K", "ab")


def test_resolve_bell(tmp_path):
    m = make_meyer()
    assert resolve_bell(m) is m
    path = tmp_path / "bell.json"
    path.write_text(json.dumps(make_meyer(5).to_dict()))
    assert resolve_bell(str(path)).smoothness_order == 5
    with pytest.raises(ConfigError):
        resolve_bell(str(tmp_path / "missing.json"))
    with pytest.raises(ConfigError):
        resolve_bell(3)

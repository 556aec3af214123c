import logging
from pathlib import Path

import pytest

from src.exceptions import InvalidConfig, IoError
from src.eyegen.datasets import generate_dataset, write_dataset
from src.kernels.schemas import PolynomialKernel
from src.protocol.schemas import Role
from src.runconfig import apply_flags, bench_config, load_parties, load_run_config, parse_endpoint, parse_run_config

FULL = """\
seed = 7
frac_bits = 18
session_id = "00112233445566778899aabbccddeeff"
test_fraction = 0.25

[datasets]
alice = "alice.rekd"
bob = "bob.rekd"

[endpoints]
server = "10.0.0.3:9000"

[svr]
mode = "fixed"
n_jobs = 2

[svr.pitch]
C = 2.0
epsilon = 0.01
kernel = { kind = "polynomial", degree = 3 }

[svr.yaw]
C = 1.0
epsilon = 0.05

[output]
report = "out.csv"
"""


def test_full_config():
    cfg = parse_run_config(FULL)
    assert cfg.seed == 7 and cfg.frac_bits == 18
    assert cfg.datasets.alice == Path("alice.rekd")
    assert cfg.endpoints.as_map()[Role.SERVER] == ("10.0.0.3", 9000)
    assert cfg.svr.pitch.kernel == PolynomialKernel(degree=3)
    assert cfg.session_bytes() == bytes.fromhex("00112233445566778899aabbccddeeff")
    bench = bench_config(cfg, repetitions=3)
    assert bench.hp_yaw.C == 1.0 and bench.repetitions == 3 and bench.test_fraction == 0.25


def test_defaults_without_a_file():
    cfg = load_run_config(None)
    assert cfg.svr.mode == "cv"
    assert len(cfg.session_bytes()) == 16


@pytest.mark.parametrize(
    "text, where",
    [
        ("seed = 1\nbogus = 2\n", "<config>:2: bogus"),
        ("seed = 1\n\n[svr]\nmode = \"cv\"\nn_jobs = 0\n", "<config>:5: svr.n_jobs"),
        ("frac_bits = 40\n", "<config>:1: frac_bits"),
        ("[endpoints]\nbob = \"nowhere\"\n", "<config>:2: endpoints.bob"),
        ("session_id = \"abc\"\n", "<config>:1: session_id"),
    ],
)
def test_errors_name_key_and_line(text, where):
    with pytest.raises(InvalidConfig) as info:
        parse_run_config(text)
    assert str(info.value).startswith(where)
    assert info.value.exit_code == 2


def test_fixed_mode_needs_both_models():
    with pytest.raises(InvalidConfig, match="svr"):
        parse_run_config('[svr]\nmode = "fixed"\n\n[svr.pitch]\nC = 1.0\nepsilon = 0.1\n')


def test_toml_syntax_error():
    with pytest.raises(InvalidConfig):
        parse_run_config("seed = = 1")


def test_flags_override_file():
    cfg = apply_flags(parse_run_config(FULL), seed=3, alice_data=Path("x.rekd"), server="127.0.0.1:1", frac_bits=None)
    assert cfg.seed == 3 and cfg.frac_bits == 18
    assert cfg.datasets.alice == Path("x.rekd") and cfg.datasets.bob == Path("bob.rekd")
    assert cfg.endpoints.server == "127.0.0.1:1"
    with pytest.raises(InvalidConfig):
        apply_flags(cfg, frac_bits=64)


def test_missing_datasets():
    cfg = load_run_config(None)
    with pytest.raises(InvalidConfig, match="datasets.alice"):
        cfg.require_datasets(Role.ALICE, Role.BOB)


def test_unreadable_file(tmp_path):
    with pytest.raises(IoError):
        load_run_config(tmp_path / "missing.toml")


@pytest.mark.parametrize("value", ["host", ":80", "h:99999", "h:x"])
def test_bad_endpoints(value):
    with pytest.raises(ValueError):
        parse_endpoint(value)


def test_load_parties_logs_dataset_digests(tmp_path, caplog):
    digests = {}
    for seed, role in enumerate((Role.ALICE, Role.BOB)):
        path = tmp_path / f"{role.value}.rekd"
        digests[role] = write_dataset(path, *generate_dataset(4 + seed))
    cfg = apply_flags(load_run_config(None), alice_data=tmp_path / "alice.rekd", bob_data=tmp_path / "bob.rekd")
    with caplog.at_level(logging.INFO, logger="src.runconfig"):
        parties = load_parties(cfg, Role.ALICE, Role.BOB)
    assert [parties[role][1].n for role in (Role.ALICE, Role.BOB)] == [4, 5]
    assert all(digest in caplog.text for digest in digests.values())

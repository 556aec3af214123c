"""TOML run configuration shared by every subcommand.

    seed = 7
    frac_bits = 20
    session_id = "8f0c..."        # 32 hex digits; random when omitted

    [datasets]
    alice = "alice.rekd"
    bob = "bob.rekd"

    [endpoints]
    server = "127.0.0.1:47003"

    [svr]
    mode = "cv"                    # or "fixed" with [svr.pitch] / [svr.yaw]

    [output]
    report = "report.csv"
"""
import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import Field, ValidationError, field_validator, model_validator

from src.audit.schemas import BenchConfig
from src.config import settings
from src.exceptions import InvalidConfig, IoError
from src.eyegen.datasets import file_checksum, read_dataset
from src.protocol.schemas import LabelVector, Role
from src.ring.random import EntropyMode
from src.schemas import CustomBase
from src.svr.schemas import CvGrid, SvrHyperparams
from src.transport.frames import SESSION_ID_LEN, new_session_id

logger = logging.getLogger(__name__)


def parse_endpoint(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not host or not port.isdigit() or not 0 <= int(port) < 65536:
        raise ValueError(f"endpoint {value!r} is not host:port")
    return host, int(port)


def parse_session_id(value: str) -> bytes:
    try:
        raw = bytes.fromhex(value)
    except ValueError:
        raw = b""
    if len(raw) != SESSION_ID_LEN:
        raise ValueError(f"session id must be {2 * SESSION_ID_LEN} hex digits")
    return raw


class DatasetPaths(CustomBase):
    alice: Path | None = None
    bob: Path | None = None


class EndpointConfig(CustomBase):
    alice: str = f"{settings.host}:{settings.alice_port}"
    bob: str = f"{settings.host}:{settings.bob_port}"
    server: str = f"{settings.host}:{settings.server_port}"

    @field_validator("alice", "bob", "server")
    @classmethod
    def check_endpoint(cls, value: str) -> str:
        parse_endpoint(value)
        return value

    def as_map(self) -> dict[Role, tuple[str, int]]:
        return {role: parse_endpoint(getattr(self, role.value)) for role in Role}


class SvrConfig(CustomBase):
    mode: Literal["cv", "fixed"] = "cv"
    grid: CvGrid = CvGrid()
    pitch: SvrHyperparams | None = None
    yaw: SvrHyperparams | None = None
    n_jobs: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_fixed(self) -> "SvrConfig":
        if self.mode == "fixed" and (self.pitch is None or self.yaw is None):
            raise ValueError("fixed mode needs both [svr.pitch] and [svr.yaw]")
        return self


class OutputPaths(CustomBase):
    report: Path | None = None
    model: Path | None = None


class RunConfig(CustomBase):
    datasets: DatasetPaths = DatasetPaths()
    endpoints: EndpointConfig = EndpointConfig()
    frac_bits: int = Field(default_factory=lambda: settings.frac_bits, ge=1, le=30)
    seed: int = 0
    session_id: str | None = None
    entropy: EntropyMode | None = None
    test_fraction: float = Field(default=0.2, ge=0.0, lt=1.0)
    timeout_secs: float = Field(default_factory=lambda: settings.timeout_secs, gt=0.0)
    svr: SvrConfig = SvrConfig()
    output: OutputPaths = OutputPaths()

    @field_validator("session_id")
    @classmethod
    def check_session(cls, value: str | None) -> str | None:
        if value is not None:
            parse_session_id(value)
        return value

    def session_bytes(self) -> bytes:
        return parse_session_id(self.session_id) if self.session_id else new_session_id()

    def require_datasets(self, *roles: Role) -> None:
        missing = [role.value for role in roles if getattr(self.datasets, role.value) is None]
        if missing:
            raise InvalidConfig(f"datasets.{missing[0]}: a dataset path is required")


_TABLE = re.compile(r"^\s*\[+\s*([^\]]+?)\s*\]+")
_KEY = re.compile(r"^\s*([A-Za-z0-9_\-\"\.]+)\s*=")


def _locate(text: str, loc: tuple) -> int | None:
    """Line number (1-based) of the deepest key of ``loc`` that appears in the file."""
    wanted = [str(part) for part in loc]
    best, best_depth = None, 0
    table: list[str] = []
    for number, line in enumerate(text.splitlines(), start=1):
        if match := _TABLE.match(line):
            table = [part.strip().strip('"') for part in match.group(1).split(".")]
            path = table
        elif match := _KEY.match(line):
            path = table + [part.strip().strip('"') for part in match.group(1).split(".")]
        else:
            continue
        depth = len(path)
        if depth > best_depth and wanted[:depth] == path:
            best, best_depth = number, depth
    return best


def parse_run_config(text: str, source: str = "<config>") -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise InvalidConfig(f"{source}: {exc}")
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        error = exc.errors()[0]
        key = ".".join(str(part) for part in error["loc"])
        line = _locate(text, error["loc"])
        where = f"{source}:{line}" if line else source
        raise InvalidConfig(f"{where}: {key}: {error['msg']}")


def load_run_config(path: Path | str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}")
    return parse_run_config(text, str(path))


def bench_config(cfg: RunConfig, **overrides) -> BenchConfig:
    fixed = cfg.svr.mode == "fixed"
    values = dict(
        seed=cfg.seed,
        test_fraction=cfg.test_fraction,
        frac_bits=cfg.frac_bits,
        entropy=cfg.entropy,
        hp_pitch=cfg.svr.pitch if fixed else None,
        hp_yaw=cfg.svr.yaw if fixed else None,
        grid=cfg.svr.grid,
        n_jobs=cfg.svr.n_jobs,
    )
    values.update(overrides)
    return BenchConfig(**values)


def apply_flags(cfg: RunConfig, **flags) -> RunConfig:
    """Command-line flags win over the config file."""
    datasets = cfg.datasets.model_copy(
        update={role: flags.pop(f"{role}_data") for role in ("alice", "bob") if flags.get(f"{role}_data") is not None}
    )
    endpoints = cfg.endpoints.model_copy(
        update={role: flags.pop(role) for role in ("alice", "bob", "server") if flags.get(role) is not None}
    )
    update = {key: value for key, value in flags.items() if value is not None and key in RunConfig.model_fields}
    merged = cfg.model_copy(update={"datasets": datasets, "endpoints": endpoints, **update})
    # re-validate so flag values get the same checks as file values
    try:
        return RunConfig.model_validate(merged.model_dump())
    except ValidationError as exc:
        error = exc.errors()[0]
        raise InvalidConfig(f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}")


def load_parties(cfg: RunConfig, *roles: Role) -> dict[Role, tuple[np.ndarray, LabelVector]]:
    cfg.require_datasets(*roles)
    parties = {}
    for role in roles:
        path = getattr(cfg.datasets, role.value)
        parties[role] = read_dataset(path)
        logger.info("%s dataset %s (%d samples, sha256 %s)", role.value, path, parties[role][1].n, file_checksum(path))
    return parties

"""Click options shared by several subcommands."""
from pathlib import Path

import click

config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="TOML run configuration."
)
seed_option = click.option("--seed", type=int, help="Run seed (shuffles and seeded masks).")
session_option = click.option("--session", "session_hex", help="Session id, 32 hex digits.")
frac_bits_option = click.option("--frac-bits", type=click.IntRange(1, 30), help="Fractional bits of the fixed-point codec.")


def dataset_options(func):
    for role in ("bob", "alice"):
        func = click.option(
            f"--{role}-data", type=click.Path(exists=True, dir_okay=False, path_type=Path), help=f"{role}'s REKD dataset."
        )(func)
    return func


def endpoint_options(func):
    for role in ("server", "bob", "alice"):
        func = click.option(f"--{role}", help=f"{role} endpoint, host:port.")(func)
    return func

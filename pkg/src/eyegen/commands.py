from pathlib import Path

import click

from src.eyegen.datasets import export_csv, generate_dataset, write_dataset
from src.eyegen.schemas import EyeModelParams


@click.command("gen")
@click.option("--n", "n", type=click.IntRange(min=1), required=True, help="Number of samples.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--noise-std", type=click.FloatRange(min=0.0), default=0.0, show_default=True, help="Landmark noise in model units.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, path_type=Path), help="Also export a 38-column CSV.")
def gen(n: int, seed: int, noise_std: float, out_path: Path, csv_path: Path | None):
    """Generate a synthetic eye-landmark dataset (REKD)."""
    features, labels = generate_dataset(n, EyeModelParams(seed=seed, landmark_noise_std=noise_std))
    digest = write_dataset(out_path, features, labels)
    if csv_path:
        export_csv(csv_path, features, labels)
    click.echo(f"{labels.n} samples written to {out_path}")
    click.echo(f"sha256 {digest}")

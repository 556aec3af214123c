from pathlib import Path

import click

from src.audit.bench import run_benchmark
from src.audit.equivalence import check_gram_equivalence
from src.audit.privacy import check_view_uniformity, collect_views, compare_with_simulator, simulate_server_views
from src.audit.reports import format_table, format_view_report, write_report_csv
from src.audit.schemas import MIN_TRIALS
from src.eyegen.datasets import generate_dataset
from src.eyegen.schemas import EyeModelParams
from src.options import config_option, seed_option
from src.runconfig import apply_flags, bench_config, load_run_config


def _sizes(value: str) -> list[int]:
    try:
        sizes = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"{value!r} is not a comma-separated list of sizes")
    if not sizes or min(sizes) < 2:
        raise click.BadParameter("sizes must be at least 2")
    return sizes


@click.command("bench")
@config_option
@click.option("--sizes", default="5000,10000,20000", show_default=True, help="Comma-separated total sample counts.")
@click.option("--repetitions", type=click.IntRange(min=1), default=10, show_default=True)
@seed_option
@click.option("--noise-std", type=click.FloatRange(min=0.0), default=0.0, show_default=True)
@click.option("--transport", type=click.Choice(["memory", "tcp"]), default="memory", show_default=True)
@click.option("--no-plaintext", is_flag=True, help="Skip the plaintext comparison run.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False, path_type=Path))
def bench(config_path, sizes, repetitions, seed, noise_std, transport, no_plaintext, report_path):
    """Time the protocol and the server pipeline for several dataset sizes."""
    cfg = apply_flags(load_run_config(config_path), seed=seed)
    config = bench_config(
        cfg,
        repetitions=repetitions,
        transport=transport,
        compare_plaintext=not no_plaintext,
        eye=EyeModelParams(seed=cfg.seed, landmark_noise_std=noise_std),
    )
    reports = run_benchmark(_sizes(sizes), config)
    report_path = report_path or cfg.output.report
    if report_path:
        write_report_csv(report_path, reports)
    click.echo(format_table(reports))


@click.command("audit")
@click.option("--trials", type=click.IntRange(min=1), default=MIN_TRIALS, show_default=True)
@seed_option
@click.option("--entropy", type=click.Choice(["os", "seeded"]), default="seeded", show_default=True)
@click.option("--n", "n", type=click.IntRange(min=2), default=1000, show_default=True, help="Samples for the gram equivalence run.")
@click.pass_context
def audit(ctx, trials, seed, entropy, n):
    """Privacy statistics on the parties' views and the gram equivalence gate."""
    seed = seed or 0
    features, labels = generate_dataset(2, EyeModelParams(seed=seed))
    alice_x, bob_x = features[:, :1], features[:, 1:]

    server_view, bob_view = collect_views(alice_x, bob_x, trials, entropy=entropy, seed=seed)
    reports = [
        check_view_uniformity(server_view),
        check_view_uniformity(bob_view),
        compare_with_simulator(server_view, simulate_server_views(alice_x, bob_x, trials, seed=seed)),
    ]
    broken, _ = collect_views(alice_x, bob_x, trials, entropy="zero")
    sanity = check_view_uniformity(broken)

    for report in reports:
        click.echo(format_view_report(report))
    click.echo(f"zeroed masks: {format_view_report(sanity)} (must be flagged)")

    diff = check_gram_equivalence(*generate_dataset(n, EyeModelParams(seed=seed)), seed=seed)
    click.echo(f"gram equivalence over {n} samples: max |K_private - K_plain| = {diff:g}")

    failed = any(report.leak_detected for report in reports) or not sanity.leak_detected or diff != 0.0
    if failed:
        click.echo("audit FAILED", err=True)
        ctx.exit(1)
    click.echo("audit passed")

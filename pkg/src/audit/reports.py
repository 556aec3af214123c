"""CSV and plain-text renderings of benchmark and audit reports.

CSV columns, one row per benchmark size:
n_a, n_b, n_f, n_test, frac_bits, repetitions, then <timing>_mean and
<timing>_std for alice_encode, bob_encode, server_assemble, server_train,
server_predict_total (seconds) and per_sample_predict_ms, then
protocol_bytes, auxiliary_bytes, framing_bytes, mae_private, mae_plaintext
(degrees), pitch_C, pitch_epsilon, pitch_kernel, yaw_C, yaw_epsilon,
yaw_kernel, gram_checksum.
"""
import csv
from pathlib import Path

from src.audit.schemas import BenchReport, TimingStat, ViewReport
from src.exceptions import IoError
from src.svr.schemas import SvrHyperparams

TIMINGS = ("alice_encode", "bob_encode", "server_assemble", "server_train", "server_predict_total", "per_sample_predict_ms")


def _kernel_label(hp: SvrHyperparams) -> str:
    kernel = hp.kernel
    if kernel.kind == "rbf":
        return f"rbf(gamma={kernel.gamma:g})"
    if kernel.kind == "polynomial":
        return f"polynomial(degree={kernel.degree},offset={kernel.offset:g})"
    return "linear"


def report_row(report: BenchReport) -> dict[str, object]:
    row: dict[str, object] = {
        "n_a": report.n_a,
        "n_b": report.n_b,
        "n_f": report.n_f,
        "n_test": report.n_test,
        "frac_bits": report.frac_bits,
        "repetitions": report.repetitions,
    }
    for name in TIMINGS:
        stat: TimingStat = getattr(report, name)
        row[f"{name}_mean"] = stat.mean
        row[f"{name}_std"] = stat.std
    row.update(
        protocol_bytes=report.protocol_bytes,
        auxiliary_bytes=report.auxiliary_bytes,
        framing_bytes=report.framing_bytes,
        mae_private=report.mae_private,
        mae_plaintext="" if report.mae_plaintext is None else report.mae_plaintext,
    )
    for target, hp in (("pitch", report.hp_pitch), ("yaw", report.hp_yaw)):
        row[f"{target}_C"] = hp.C
        row[f"{target}_epsilon"] = hp.epsilon
        row[f"{target}_kernel"] = _kernel_label(hp)
    row["gram_checksum"] = report.gram_checksum
    return row


def write_report_csv(path: Path | str, reports: list[BenchReport]) -> None:
    rows = [report_row(report) for report in reports]
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else [])
            writer.writeheader()
            writer.writerows(rows)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}")


def format_table(reports: list[BenchReport]) -> str:
    header = f"{'n':>7} {'n_test':>6} {'MAE(deg)':>9} {'plain':>9} {'encode(s)':>10} {'assemble(s)':>11} {'train(s)':>9} {'ms/pred':>8} {'bytes':>12}"
    lines = [header, "-" * len(header)]
    for r in reports:
        plain = f"{r.mae_plaintext:9.4f}" if r.mae_plaintext is not None else f"{'-':>9}"
        encode = max(r.alice_encode.mean, r.bob_encode.mean)
        lines.append(
            f"{r.n_a + r.n_b:>7} {r.n_test:>6} {r.mae_private:9.4f} {plain} {encode:10.4f} "
            f"{r.server_assemble.mean:11.4f} {r.server_train.mean:9.3f} {r.per_sample_predict_ms.mean:8.4f} {r.protocol_bytes:>12}"
        )
    return "\n".join(lines)


def format_view_report(report: ViewReport) -> str:
    verdict = "LEAK" if report.leak_detected else "ok"
    return (
        f"{report.owner:>6} {report.method:>10}: {report.pass_fraction:7.2%} of {len(report.tests)} tests pass "
        f"over {report.trials} trials [{verdict}]"
    )

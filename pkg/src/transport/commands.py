from pathlib import Path

import click

from src.audit.bench import benchmark_parties, select_hyperparams
from src.audit.reports import format_table, write_report_csv
from src.exceptions import InvalidConfig
from src.options import config_option, dataset_options, endpoint_options, frac_bits_option, seed_option, session_option
from src.protocol.roles import run_alice, run_bob, run_server
from src.protocol.schemas import PartyConfig, Role, ServerConfig
from src.ring.arithmetic import checksum
from src.runconfig import RunConfig, apply_flags, bench_config, load_parties, load_run_config, parse_session_id
from src.svr.operations import train_gaze
from src.svr.storage import save_models
from src.transport.links import TcpTransport, Transcript
from src.transport.session import run_daemon


@click.command("run-local")
@config_option
@dataset_options
@seed_option
@frac_bits_option
@click.option("--transport", type=click.Choice(["memory", "tcp"]), default="memory", show_default=True)
@click.option("--insecure-plaintext", is_flag=True, help="Also train on the plaintext gram and report its MAE.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--model-out", type=click.Path(dir_okay=False, path_type=Path))
def run_local(config_path, alice_data, bob_data, seed, frac_bits, transport, insecure_plaintext, report_path, model_out):
    """Run all three roles in one process and evaluate on a held-out fifth."""
    cfg = apply_flags(load_run_config(config_path), alice_data=alice_data, bob_data=bob_data, seed=seed, frac_bits=frac_bits)
    parties = load_parties(cfg, Role.ALICE, Role.BOB)
    report, pair = benchmark_parties(
        parties[Role.ALICE],
        parties[Role.BOB],
        bench_config(cfg, repetitions=1, warmup=False, compare_plaintext=insecure_plaintext, transport=transport),
    )
    report_path = report_path or cfg.output.report
    if report_path:
        write_report_csv(report_path, [report])
    model_out = model_out or cfg.output.model
    if model_out:
        save_models(model_out, pair)
    click.echo(format_table([report]))
    click.echo(f"gram sha256 {report.gram_checksum}")


def _session(cfg: RunConfig, session_hex: str | None) -> bytes:
    value = session_hex or cfg.session_id
    if not value:
        raise InvalidConfig("session_id: daemons need an explicit session id (--session)")
    try:
        return parse_session_id(value)
    except ValueError as exc:
        raise InvalidConfig(f"session_id: {exc}")


@click.command("party")
@click.option("--role", type=click.Choice(["alice", "bob"]), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@config_option
@session_option
@seed_option
@click.option("--entropy", type=click.Choice(["os", "seeded"]))
@endpoint_options
def party(role, data_path, config_path, session_hex, seed, entropy, alice, bob, server):
    """Run one input party over TCP for a single session."""
    role = Role(role)
    cfg = apply_flags(
        load_run_config(config_path),
        seed=seed,
        entropy=entropy,
        alice=alice,
        bob=bob,
        server=server,
        **{f"{role.value}_data": data_path},
    )
    features, labels = load_parties(cfg, role)[role]
    party_cfg = PartyConfig(
        role=role,
        features=features,
        labels=labels.targets,
        seed=cfg.seed,
        session_id=_session(cfg, session_hex),
        frac_bits=cfg.frac_bits,
        **({"entropy": cfg.entropy} if cfg.entropy else {}),
    )
    transport = TcpTransport(cfg.endpoints.as_map(), cfg.timeout_secs)
    transcript = Transcript(owner=role)

    async def main():
        if role == Role.ALICE:
            return await run_alice(party_cfg, transport, transcript)
        async with transport.listen(Role.BOB) as acceptor:
            return await run_bob(party_cfg, transport, acceptor, transcript)

    outcome = run_daemon(main)
    click.echo(f"{role.value}: shares uploaded ({labels.n} samples, encode {outcome.encode_secs:.3f}s)")


@click.command("server")
@config_option
@session_option
@frac_bits_option
@click.option("--model-out", type=click.Path(dir_okay=False, path_type=Path), help="Train on the gram matrix and save the models.")
@endpoint_options
def server_daemon(config_path, session_hex, frac_bits, model_out, alice, bob, server):
    """Run the function party over TCP: assemble the gram matrix, optionally train."""
    cfg = apply_flags(load_run_config(config_path), frac_bits=frac_bits, alice=alice, bob=bob, server=server)
    server_cfg = ServerConfig(session_id=_session(cfg, session_hex), frac_bits=cfg.frac_bits)
    transport = TcpTransport(cfg.endpoints.as_map(), cfg.timeout_secs)

    async def main():
        async with transport.listen(Role.SERVER) as acceptor:
            return await run_server(server_cfg, acceptor, Transcript(owner=Role.SERVER))

    outcome = run_daemon(main)
    click.echo(f"gram {outcome.gram.n}x{outcome.gram.n} (n_a={outcome.gram.n_a}, n_b={outcome.gram.n_b})")
    click.echo(f"gram sha256 {checksum(outcome.gram.k)}")

    model_out = model_out or cfg.output.model
    if model_out:
        # the daemon keeps no holdout: every received sample trains the model
        hp_pitch, hp_yaw = select_hyperparams(outcome.gram, outcome.labels, bench_config(cfg, test_fraction=0.0))
        pair = train_gaze(outcome.gram.k, outcome.labels, hp_pitch, hp_yaw, cfg.svr.n_jobs)
        save_models(model_out, pair)
        click.echo(f"models written to {model_out}")

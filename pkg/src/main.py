import logging

import click

from src.audit.commands import audit
from src.audit.commands import bench
from src.config import settings
from src.exceptions import RekException
from src.eyegen.commands import gen
from src.svr.commands import cv
from src.svr.commands import predict
from src.transport.commands import party
from src.transport.commands import run_local
from src.transport.commands import server_daemon


class RekGroup(click.Group):
    """Maps domain exceptions to the documented exit codes."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except RekException as exc:
            click.echo(f"error: {type(exc).__name__}: {exc.detail}", err=True)
            ctx.exit(exc.exit_code)


@click.group(cls=RekGroup, name=settings.app_name)
@click.option("--log-level", default=settings.log_level, show_default=True, help="Python logging level.")
def cli(log_level: str):
    logging.basicConfig(level=log_level.upper(), format="%(levelname)-5.5s [%(name)s] %(message)s")


cli.add_command(gen)
cli.add_command(run_local)
cli.add_command(party)
cli.add_command(server_daemon)
cli.add_command(predict)
cli.add_command(cv)
cli.add_command(bench)
cli.add_command(audit)


if __name__ == "__main__":
    cli()

"""
Shared plumbing for the biharmonic management commands.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from apps.catalog.entries import CaseId
from apps.cli.config import OutputFormat, RunConfig, coerce_values, read_config_file
from apps.cli.runner import COLUMN_DOCS, run
from apps.core.exceptions import (
    DomainError,
    InvalidParameterError,
    NumericalFailure,
    UnsupportedError,
)
from apps.geometry.profiles import ProfileKind

logger = logging.getLogger(__name__)

VALIDATION_EXIT = 2
NUMERICAL_EXIT = 3


class BiharmonicCommand(BaseCommand):
    """
    Subclasses set ``command`` and add their own flags in
    ``add_command_arguments``. Flag values override values read from
    ``--config``.
    """

    command = ""
    requires_system_checks = []
    write_csv_to_stdout = True

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.epilog = f"CSV columns: {COLUMN_DOCS[self.command]}"
        return parser

    def add_arguments(self, parser):
        parser.add_argument('--config', type=str, help='key=value file with default flag values')
        parser.add_argument('--output', '-o', type=str, help='Write rows to this file instead of stdout')
        parser.add_argument(
            '--save', action='store_true', help='Write rows to the default output directory'
        )
        parser.add_argument(
            '--format', dest='fmt', choices=OutputFormat.values, help='Output file format (default csv)'
        )
        parser.add_argument('--m', type=int, help='Domain dimension (default 4)')
        parser.add_argument('--c', type=float, help='Domain curvature or family parameter c')
        parser.add_argument('--d', type=float, help='Target curvature parameter d')
        parser.add_argument('--lambda', '--lam', dest='lam', type=float, help='Eigenmap eigenvalue lambda')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    @staticmethod
    def add_case_argument(parser, choices=None, help_text='Catalog case id'):
        parser.add_argument('--case', choices=choices or CaseId.values, help=help_text)

    @staticmethod
    def add_model_arguments(parser):
        parser.add_argument('--from', '--domain', dest='domain', choices=ProfileKind.values, help='Domain model')
        parser.add_argument('--to', '--target', dest='target', choices=ProfileKind.values, help='Target model')

    def build_config(self, options) -> RunConfig:
        values = {}
        if options.get('config'):
            values.update(read_config_file(options['config']))
        explicit = {
            key: value
            for key, value in options.items()
            if key in RunConfig.__dataclass_fields__ and value is not None and value is not False
        }
        values.update(coerce_values(explicit))
        values['command'] = self.command
        return RunConfig(**values)

    def handle(self, *args, **options):
        try:
            config = self.build_config(options)
            result = run(config, stream=self.stdout if self.write_csv_to_stdout else None)
        except (InvalidParameterError, DomainError, UnsupportedError) as exc:
            raise CommandError(str(exc), returncode=VALIDATION_EXIT)
        except NumericalFailure as exc:
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=NUMERICAL_EXIT)

        self.report(config, result)

    def report(self, config, result):
        stream = self.stderr if self.write_csv_to_stdout and not result.output_path else self.stdout
        if result.output_path:
            stream.write(self.style.SUCCESS(f'Wrote {len(result.rows)} rows to {result.output_path}'))
        if result.message:
            stream.write(result.message)

"""
Certify equivariant stability by the smallest Rayleigh quotient.

Usage:
    python manage.py stability --case hyperbolic --c 1 --d 1 --tmin -10 --tmax -0.1 --nodes 512
    python manage.py stability --case sphere --witness Inv1B --generic --tmin 0 --tmax 10
"""
from apps.catalog.entries import CaseId
from apps.cli.base import BiharmonicCommand
from apps.cli.config import Command as RunCommand
from apps.stability.cases import StabilityKind


class Command(BiharmonicCommand):
    help = 'Write a stability certificate row for a catalog solution'
    command = RunCommand.STABILITY

    def add_command_arguments(self, parser):
        self.add_case_argument(
            parser,
            choices=[kind for kind in StabilityKind.values if kind != StabilityKind.CUSTOM],
            help_text='Stability case',
        )
        parser.add_argument('--witness', choices=CaseId.values, help='Catalog solution to test (default per case)')
        parser.add_argument('--generic', action='store_true', help='Use the generic critical-point form')
        parser.add_argument('--tmin', type=float, help='Left end of the t interval')
        parser.add_argument('--tmax', type=float, help='Right end of the t interval')
        parser.add_argument('--nodes', type=int, help='Grid nodes (default 512, at least 64)')

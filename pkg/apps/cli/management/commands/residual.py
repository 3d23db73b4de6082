"""
Sweep the biharmonicity residual of a catalog solution.

Usage:
    python manage.py residual --case C1B --c 1 --d 1 --rmin 0.01 --rmax 10 --nodes 500
    python manage.py residual --case NX3B --alpha 0.7
"""
from apps.cli.base import BiharmonicCommand
from apps.cli.config import Command as RunCommand


class Command(BiharmonicCommand):
    help = 'Write (r, residual) rows for a catalog case'
    command = RunCommand.RESIDUAL

    def add_command_arguments(self, parser):
        self.add_case_argument(parser)
        parser.add_argument('--rmin', type=float, help='Smallest radius (default: per-case verification grid)')
        parser.add_argument('--rmax', type=float, help='Largest radius')
        parser.add_argument('--nodes', type=int, help='Number of sample radii (default 200)')
        parser.add_argument('--alpha', type=float, help='Value of alpha for nonexistence identities')

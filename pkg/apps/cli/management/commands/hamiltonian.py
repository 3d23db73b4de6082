"""
Evaluate the Hamiltonian along a catalog solution in t = ln r.

Usage:
    python manage.py hamiltonian --case C1C --tmin -8 --tmax -0.1
    python manage.py hamiltonian --case CylQuarterPi --lambda 3
"""
from apps.cli.base import BiharmonicCommand
from apps.cli.config import Command as RunCommand


class Command(BiharmonicCommand):
    help = 'Write (t, beta, H) rows along a catalog solution'
    command = RunCommand.HAMILTONIAN

    def add_command_arguments(self, parser):
        self.add_case_argument(parser)
        parser.add_argument('--tmin', type=float, help='Start of the t range')
        parser.add_argument('--tmax', type=float, help='End of the t range')
        parser.add_argument('--nodes', type=int, help='Number of sample points (default 201)')

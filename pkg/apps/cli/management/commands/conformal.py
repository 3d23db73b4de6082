"""
Integrate the conformal reduction alpha' = h(alpha)/f(r).

Usage:
    python manage.py conformal --from euclidean --to sphere --c 1 --d 1 --rmax 10
    python manage.py conformal --from sphere --to sphere --c 2 --d 1 --nodes 101
"""
from apps.cli.base import BiharmonicCommand
from apps.cli.config import Command as RunCommand


class Command(BiharmonicCommand):
    help = 'Write (r, alpha, dalpha, defect) rows of a conformal solution'
    command = RunCommand.CONFORMAL

    def add_command_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument('--scale', type=float, help='Pole slope a1 (default from c and d)')
        parser.add_argument('--rmin', type=float, help='Start of the output range')
        parser.add_argument('--rmax', type=float, help='End of the output range')
        parser.add_argument('--nodes', type=int, help='Number of output nodes (default 401)')
        parser.add_argument('--eps', type=float, help='Pole offset of the series start')

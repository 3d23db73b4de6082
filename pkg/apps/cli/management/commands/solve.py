"""
Solve a Dirichlet problem on the ball of radius b by shooting from the pole.

Usage:
    python manage.py solve --from euclidean --to sphere --b 1 --alpha-b 1.5708 --dalpha-b 1
    python manage.py solve --R-star 3.0 --mode conformal --nodes 200
"""
from apps.cli.base import BiharmonicCommand
from apps.cli.config import Command as RunCommand
from apps.solvers.shooting import ShootingMode


class Command(BiharmonicCommand):
    help = 'Shoot on the pole coefficients to meet boundary data at r = b'
    command = RunCommand.SOLVE

    def add_command_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument('--b', type=float, help='Boundary radius (default 1)')
        parser.add_argument('--alpha-b', '--R-star', dest='alpha_b', type=float, help='alpha(b)')
        parser.add_argument('--dalpha-b', dest='dalpha_b', type=float, help="alpha'(b) for clamped data")
        parser.add_argument('--mode', choices=ShootingMode.values, help='Boundary condition (default clamped)')
        parser.add_argument('--eps', type=float, help='Pole offset of the series start')
        parser.add_argument('--nodes', type=int, help='Resample the trajectory on this many uniform nodes')

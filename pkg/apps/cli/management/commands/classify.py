"""
Classify conformal biharmonic maps between 4-dimensional space forms.

Usage:
    python manage.py classify --from hyperbolic --to sphere
"""
from apps.cli.base import BiharmonicCommand
from apps.cli.config import Command as RunCommand


class Command(BiharmonicCommand):
    help = 'Print the classification of a pair of space forms'
    command = RunCommand.CLASSIFY
    write_csv_to_stdout = False

    def add_command_arguments(self, parser):
        self.add_model_arguments(parser)

"""
Run the reproducibility suite and print a pass/fail table.

Usage:
    python manage.py verify_all
    python manage.py verify_all --workers 8 --output out/verify.csv
"""
from django.core.management.base import CommandError

from apps.cli.base import NUMERICAL_EXIT, BiharmonicCommand
from apps.cli.config import Command as RunCommand


class Command(BiharmonicCommand):
    help = 'Run every acceptance check and print the results'
    command = RunCommand.VERIFY_ALL
    write_csv_to_stdout = False

    def add_command_arguments(self, parser):
        parser.add_argument('--workers', type=int, help='Number of checks run concurrently (default 4)')

    def report(self, config, result):
        width = max(len(row['check']) for row in result.rows)
        self.stdout.write(f"{'check'.ljust(width)}  result  detail")
        self.stdout.write('-' * (width + 40))
        for row in result.rows:
            status = self.style.SUCCESS('pass') if row['passed'] else self.style.ERROR('FAIL')
            self.stdout.write(f"{row['check'].ljust(width)}  {status}    {row['detail']}")
        if result.output_path:
            self.stdout.write(f'Wrote {len(result.rows)} rows to {result.output_path}')
        if result.details.get('failed'):
            raise CommandError(result.message, returncode=NUMERICAL_EXIT)
        self.stdout.write(self.style.SUCCESS(result.message))

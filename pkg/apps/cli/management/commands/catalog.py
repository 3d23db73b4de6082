"""
Write the catalog of closed-form solutions and nonexistence identities.

Usage:
    python manage.py catalog
    python manage.py catalog --c 2 --d 0.5 --output out/catalog.csv
"""
from apps.cli.base import BiharmonicCommand
from apps.cli.config import Command as RunCommand


class Command(BiharmonicCommand):
    help = 'Write the catalog of rotationally symmetric solutions'
    command = RunCommand.CATALOG

from django.core.management.base import BaseCommand

from entanglement_lab.utils.registry import catalog


class Command(BaseCommand):
    help = "List the available experiments and the section each reproduces"
    requires_system_checks = []

    def handle(self, *args, **options):
        for name, section, description in catalog():
            self.stdout.write(f"{name} ({section}): {description}")

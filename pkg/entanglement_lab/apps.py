from django.apps import AppConfig


class EntanglementLabConfig(AppConfig):
    name = "entanglement_lab"
    verbose_name = "Entanglement lab"

"""
Django settings for the entanglement_lab project.

The project has no web surface: Django provides configuration, logging and
the management-command runner; experiments are launched from the command line.
"""

import os
from pathlib import Path

import environ
from django.core.management.utils import get_random_secret_key

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

env = environ.Env(
    # set casting, default value
    DEBUG=(bool, False),
)

env_files = [
    BASE_DIR / ".env",
    Path("/etc/entanglement_lab/lab.env"),
]

for env_path in env_files:
    if env_path.exists():
        env.read_env(str(env_path))
        break

DEBUG = env("DEBUG", default=False)
SECRET_KEY = (
    env("SECRET_KEY") if env("SECRET_KEY", default=None) else get_random_secret_key()
)

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "rest_framework",
    "entanglement_lab",
]

# No models are stored; the database is only there to satisfy Django's app registry.
DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": env("DB_NAME", default=":memory:"),
    }
}

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# --------------------------------
# Lab
# --------------------------------
# "local" runs trial chunks in-process, "celery" dispatches them to workers.
LAB_WORKER_BACKEND = env("LAB_WORKER_BACKEND", default="local")
# Part of the random-stream derivation: changing it changes every stochastic result.
LAB_TRIALS_PER_CHUNK = env.int("LAB_TRIALS_PER_CHUNK", default=1 << 16)
LAB_AGGREGATION_THRESHOLD = env.int("LAB_AGGREGATION_THRESHOLD", default=10_000_000)
LAB_SCHEMA_DIR = BASE_DIR / "schema"

# --------------------------------
# Celery
# --------------------------------
# use broker_url "redis://redis:6379/0" when workers run in containers
CELERY_BROKER_URL = os.getenv("CELERY_BROKER_URL", "redis://127.0.0.1:6379/0")
CELERY_RESULT_BACKEND = os.getenv("CELERY_RESULT_BACKEND", "redis://127.0.0.1:6379/1")
CELERY_ACCEPT_CONTENT = ["json"]
CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_TIMEZONE = "UTC"
CELERY_IMPORTS = ["entanglement_lab.tasks"]
CELERY_TASK_ALWAYS_EAGER = env.bool("CELERY_TASK_ALWAYS_EAGER", default=True)
CELERY_TASK_EAGER_PROPAGATES = True

# --------------------------------
# Logging
# --------------------------------
LAB_LOG_FILE = env("LAB_LOG_FILE", default="")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "[{asctime}] {levelname} {name} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": env("LAB_LOG_LEVEL", default="INFO"),
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "entanglement_lab": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
}

if LAB_LOG_FILE:
    Path(LAB_LOG_FILE).parent.mkdir(parents=True, exist_ok=True)
    LOGGING["handlers"]["run_file"] = {
        "level": "INFO",
        "class": "logging.FileHandler",
        "filename": LAB_LOG_FILE,
        "formatter": "verbose",
    }
    LOGGING["loggers"]["entanglement_lab"]["handlers"].append("run_file")

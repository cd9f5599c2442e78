"""
Django settings for the aspir project.

The project has no database and no web surface: Django provides settings,
logging, management commands and the test runner for the `engine` and
`bench` apps.
"""

import os
from pathlib import Path

from engine.limits import parse_limits

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('ASPIR_SECRET_KEY', 'django-insecure-aspir-local-development-key')

DEBUG = os.environ.get('ASPIR_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'engine',
    'bench',
]

DATABASES = {}

REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': (
        'rest_framework.renderers.JSONRenderer',
    ),
    'UNAUTHENTICATED_USER': None,
}

USE_TZ = True

TIME_ZONE = 'UTC'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Overrides of the resource bounds in engine.limits.Limits, taken from the
# ASPIR_LIMITS environment variable, a comma separated key=value list such
# as "max_atoms=18,max_ir_domain=8".
ASPIR_LIMITS = parse_limits(os.environ.get('ASPIR_LIMITS', ''))

# Scale of the randomized property tests; "full" runs the complete trial counts.
ASPIR_RANDOM_TRIALS = os.environ.get('ASPIR_RANDOM_TRIALS', 'reduced')


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'WARNING',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
        'file': {
            'level': 'DEBUG',
            'class': 'logging.FileHandler',
            'filename': os.environ.get('ASPIR_LOG_FILE', str(BASE_DIR / 'aspir.log')),
            'formatter': 'verbose',
            'delay': True,
        },
    },
    'loggers': {
        'engine': {
            'handlers': ['console', 'file'],
            'level': os.environ.get('ASPIR_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
        'bench': {
            'handlers': ['console', 'file'],
            'level': os.environ.get('ASPIR_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


CELERY_BROKER_URL = os.environ.get('ASPIR_CELERY_BROKER', 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.environ.get('ASPIR_CELERY_BACKEND', 'redis://localhost:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
# Benchmark rows run in-process unless a worker pool is explicitly requested.
CELERY_TASK_ALWAYS_EAGER = os.environ.get('ASPIR_CELERY_EAGER', '1') == '1'
CELERY_TASK_EAGER_PROPAGATES = True

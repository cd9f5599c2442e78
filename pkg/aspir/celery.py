import os

from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'aspir.settings')

app = Celery('aspir')

# Load Django settings into Celery
app.config_from_object('django.conf:settings', namespace='CELERY')

app.autodiscover_tasks()

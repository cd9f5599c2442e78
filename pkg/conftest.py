# Lets pytest run the Django test suite: configure settings the way
# manage.py does and populate the app registry before collection.
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'aspir.settings')
django.setup()

import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "trihelix.settings")
django.setup()

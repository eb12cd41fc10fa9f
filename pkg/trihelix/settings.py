from pathlib import Path
from decouple import config, Csv

BASE_DIR = Path(__file__).resolve().parent.parent

# ----------------------------
# SECURITY
# ----------------------------
SECRET_KEY = config('SECRET_KEY', default='trihelix-local-secret-key')
DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='*', cast=Csv())

# ----------------------------
# APPLICATIONS
# ----------------------------
INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    'rest_framework',

    'helix',
]

# ----------------------------
# REST FRAMEWORK
# ----------------------------
# Read-only analytics over uploaded files: no accounts, no sessions.
REST_FRAMEWORK = {
    "DEFAULT_AUTHENTICATION_CLASSES": [],
    "DEFAULT_PERMISSION_CLASSES": [
        "rest_framework.permissions.AllowAny",
    ],
    "DEFAULT_RENDERER_CLASSES": [
        "rest_framework.renderers.JSONRenderer",
    ],
    "UNAUTHENTICATED_USER": None,
}

# ----------------------------
# ANALYSIS DEFAULTS
# ----------------------------
TRIHELIX = {
    'DEFAULT_AXIS': config('TRIHELIX_DEFAULT_AXIS', default='geo'),
    'FIT_DEGREE': config('TRIHELIX_FIT_DEGREE', default=2, cast=int),
    'CROSSWALK_PATH': config(
        'TRIHELIX_CROSSWALK_PATH',
        default=str(BASE_DIR / 'helix' / 'data' / 'nace_crosswalk.csv'),
    ),
    'REVISION_SWITCH_YEAR': config('TRIHELIX_REVISION_SWITCH_YEAR', default=2009, cast=int),
    'HURST_CENTERING': config('TRIHELIX_HURST_CENTERING', default='series'),
    'HURST_RANDOM_BAND': config('TRIHELIX_HURST_RANDOM_BAND', default=0.05, cast=float),
    'SIGNIFICANT_DIGITS': 12,
}

# Uploaded panels are parsed in memory; larger files go to a temporary file.
FILE_UPLOAD_MAX_MEMORY_SIZE = config('FILE_UPLOAD_MAX_MEMORY_SIZE', default=10 * 1024 * 1024, cast=int)
DATA_UPLOAD_MAX_MEMORY_SIZE = FILE_UPLOAD_MAX_MEMORY_SIZE

# ----------------------------
# MIDDLEWARE
# ----------------------------
MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'trihelix.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
            ],
        },
    },
]

# ----------------------------
# DATABASE
# ----------------------------
# Nothing is persisted; panels live only for the duration of a request or command.
DATABASES = {}

WSGI_APPLICATION = 'trihelix.wsgi.application'

# ----------------------------
# LOGGING
# ----------------------------
LOG_LEVEL = config('LOG_LEVEL', default='WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'helix': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
}

# ----------------------------
# OTHER SETTINGS
# ----------------------------
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

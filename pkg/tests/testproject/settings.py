SECRET_KEY = "autbound-tests-only"
DEBUG = True
ALLOWED_HOSTS = []

USE_TZ = True

INSTALLED_APPS = [
    "django_autbound",
]
MIDDLEWARE = []
DATABASES = {}

AUTBOUND_DISABLED_RULES = []
AUTBOUND_CENSUS_WORKERS = 1
AUTBOUND_ORACLE_BITS = 128

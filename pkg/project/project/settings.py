import os

BASE_DIR = os.path.dirname(os.path.dirname(__file__))

SECRET_KEY = 'pathfinder-test-settings-not-secret'

DEBUG = True

INSTALLED_APPS = (
    'pathfinder',
)

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': ':memory:',
    }
}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_TZ = True

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)-15s %(levelname)-7s %(message)s [%(funcName)s (%(filename)s:%(lineno)s)]',
        }
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose'
        }
    },
    'loggers': {
        'pathfinder': {
            'handlers': ['console'],
            'level': 'DEBUG'
        }
    },
}

PATHFINDER_WORKERS = 2
# Small sample grids keep the plane tests fast
PATHFINDER_MATCH_GRID = 8
PATHFINDER_RANSAC_ITERATIONS = 200
PATHFINDER_TRAIN_DTYPE = 'float64'

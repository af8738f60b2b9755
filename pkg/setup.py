import os
import sys

from setuptools import find_packages, setup


VERSION = "1.0.0"


def read(fname):
    return open(os.path.join(os.path.dirname(__file__), fname)).read()


def runtests(args):
    "Run tests"
    import django
    from django.conf import settings
    from django.core.management import execute_from_command_line

    if not settings.configured:
        SETTINGS = dict(
            INSTALLED_APPS=["jm_uplink", "tests"],
            DATABASES={
                "default": {
                    "ENGINE": "django.db.backends.sqlite3",
                    "NAME": ":memory:",
                }
            },
            SECRET_KEY="test",
            # Trials run in-process so failures show a full traceback
            JM_UPLINK_THREADS=int(os.environ.get("JM_UPLINK_THREADS", "1")),
            LOGGING={
                "version": 1,
                "disable_existing_loggers": False,
                "handlers": {"null": {"class": "logging.NullHandler"}},
                "loggers": {"jm_uplink": {"handlers": ["null"]}},
            },
        )

        # Configure
        settings.configure(**SETTINGS)
        django.setup()

    execute_from_command_line(args[:1] + ["test"] + (args[2:] or ["tests"]))


if len(sys.argv) > 1 and sys.argv[1] == "test":
    runtests(sys.argv)
    sys.exit()

setup(
    name="django-jm-uplink",
    version=VERSION,
    author="Wildfish",
    author_email="developers@wildfish.com",
    description=(
        "Uplink coverage and rate analysis for Johnson-Mehl cell networks, "
        "with a Monte Carlo simulator to check it against"
    ),
    license="BSD",
    keywords="django stochastic-geometry uplink coverage monte-carlo",
    long_description=read("README.rst"),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Framework :: Django",
        "Framework :: Django :: 3.2",
        "Framework :: Django :: 4.0",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    install_requires=[
        "django>=3.2",
        "django-yaa-settings>=1.1",
        "numpy>=1.20",
        "scipy>=1.6",
    ],
    extras_require={
        "dev": [
            # Testing
            "tox",
            # Docs
            "sphinx",
            "sphinx-autobuild",
            "sphinx_rtd_theme",
        ]
    },
    entry_points={"console_scripts": ["jm-uplink=jm_uplink.cli:main"]},
    zip_safe=True,
    packages=find_packages(exclude=("docs", "tests*")),
    include_package_data=True,
)

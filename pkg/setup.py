from setuptools import setup

setup(
    name="pytpc",
    version="1.0",
    description="Multi-view clustering by anchor graph tensor projection",
    packages=['pytpc', 'pytpc.common', 'pytpc.anchor', 'pytpc.prox', 'pytpc.metrics',
              'pytpc.loader'],
    install_requires=[
        "numpy",
        "scipy",
        "pyFFTW",
        "scikit-learn"
    ],
    extras_require={
        "test": ["pytest"]
    },
    entry_points={
        "console_scripts": ["pytpc=pytpc.cli:main"]
    },
)

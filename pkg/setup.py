"""Setup for sunglare package."""
import os

from setuptools import setup, find_packages

setup(
    name='sunglare',
    version='0.1.0',
    description='Predicts where and when drivers face sun glare along streets.',
    long_description=open('README.md', encoding='utf-8').read(),
    long_description_content_type='text/markdown',
    license=open('LICENSE').read() if os.path.exists('LICENSE') else None,
    packages=find_packages(exclude=('tests',)),
    python_requires=">=3.8",
    install_requires=open('requirements.txt').read().strip().split(),
    entry_points={
        'console_scripts': [
            'sunglare=sunglare.__main__:main',
        ],
    },
)

from setuptools import setup, find_packages

setup(
    name="ivp2Tube",
    version="0.1.0",
    description="Rigorous interval enclosures of every solution of an initial value problem, with the LLPO gadget ODEs built in.",
    packages=find_packages(exclude=("tests", "tests.*")),
    python_requires=">=3.8",
    entry_points={
        'console_scripts': [
            'ivp2Tube=ivp2Tube.__main__:main',
        ],
    },
    install_requires=[
        'mpmath>=1.2',
    ],
    extras_require={
        'test': ['pytest'],
    },
)

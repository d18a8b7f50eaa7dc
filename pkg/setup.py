from setuptools import setup, find_packages

setup(
    name='darkladder', 
    version='1.0', 
    packages=find_packages(include=['darkladder', 'darkladder.*']),
    package_data={'darkladder': ['data/*.yaml']},
    install_requires=['numpy', 'scipy', 'matplotlib', 'numba', 'tqdm', 'pyyaml', 'yacs'],
)

from setuptools import setup, find_packages

setup(name='cset',
      version='0.1',
      description='Conformal prediction sets from classifier score matrices',
      license='MIT',
      packages=find_packages(include=['cset', 'cset.*']),
      package_data={ 'cset': [ 'config/config.json' ] },
      install_requires=[ 'numpy', 'scipy', 'pandas' ],
      extras_require={ 'test': [ 'pytest', 'hypothesis' ] },
      entry_points={ 'console_scripts': [ 'cset = cset.cli:main' ] },
      zip_safe=False)

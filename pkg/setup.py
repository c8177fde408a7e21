from setuptools import setup, find_packages


setup(name='ScatterQuery',
      version='0.1.0',
      description='PolSAR decomposition toolkit and scattering query pretraining harness',
      author='',
      author_email='',
      url='',
      install_requires=[
          'numpy', 'scipy', 'pandas', 'Pillow',
          'scikit-learn', 'PyYAML', 'yacs'],
      extras_require={'test': ['pytest', 'hypothesis', 'torch']},
      packages=find_packages(exclude=('tests',)),
      entry_points={'console_scripts': ['scatterquery = scatterquery.cli:main']},
      keywords=[
          'Polarimetric SAR',
          'Yamaguchi decomposition',
          'Self-supervised pretraining'
      ])

from setuptools import find_packages, setup

setup(name='edge-proposals',
      version='0.1.0',
      description='Proposal-set augmented link prediction on graphs',
      package_dir={'': 'src'},
      packages=find_packages('src'),
      python_requires='>=3.8',
      install_requires=[
          'pandas>=2.0',
          'numpy>=1.24',
          'scipy>=1.9',
          'scikit-learn>=1.3',
          'joblib>=1.3',
          'networkx>=3.0',
          'python-dotenv>=1.0',
      ],
      entry_points={
          'console_scripts': ['edge-proposals=edge_proposals.cli:main'],
      },
      zip_safe=False,
      )

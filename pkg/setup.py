from setuptools import setup
import os

version_path = os.path.join(os.path.abspath(os.path.dirname(__file__)),
                            "smallcurv", "version.py")
with open(version_path) as fp:
    exec(fp.read())

setup(name='smallcurv',
      version=str(__version__),
      packages=['smallcurv',
                'smallcurv.immersion'],
      package_data={'smallcurv': ['fixtures/*.json']},
      description="Exact curvature bounds for tensor-product Veronese immersions of products of spheres",
      install_requires=['numpy', 'scipy'],
      entry_points={'console_scripts': ['smallcurv = smallcurv.cli:main']},
      include_package_data=True)

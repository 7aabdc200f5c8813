from setuptools import setup

setup(
    name="rate_regions",
    version="0.1",
    packages=["rate_regions"],
    package_data={"rate_regions": []},
    install_requires=["torch", "scipy", "docopt"],
    entry_points={"console_scripts": ["rate-regions = rate_regions.cli:main"]},
    setup_requires=["pytest-runner"],
    tests_require=["pytest", "hypothesis"],
)

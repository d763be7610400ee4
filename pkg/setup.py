from setuptools import find_packages, setup

setup(
    name="hybeam",
    version="0.1.0",
    packages=find_packages(exclude=["tests"]),
    include_package_data=True,
    package_data={"hybeam": ["schemas/*.json", "presets.yml"]},
    zip_safe=False,
    install_requires=[
        "numpy",
        "matplotlib",
        "click",
        "jsonschema",
        "pyyaml"
    ],
    extras_require={
        "test": ["pytest"]
    },
    entry_points={
        "console_scripts": ["hybeam=hybeam.cli:cli"]
    }
)

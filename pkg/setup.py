from setuptools import setup, find_packages

setup(
    name="rehorizon",
    version="0.1.0",
    description="Rolling-horizon flexible job shop scheduling with learned variable fixing",
    long_description=open("README.md", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    license="MIT",
    python_requires=">=3.10",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    include_package_data=True,
    package_data={
        "rehorizon": ["featureSchema.yaml"],
    },
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.8",
        "pandas>=1.4",
        "PyYAML>=6.0",
        "posix_ipc; sys_platform != 'win32'",
        "pywin32; sys_platform == 'win32'",
    ],
    extras_require={
        "test": ["pytest>=7"],
    },
    entry_points={
        "console_scripts": [
            "rehorizon = rehorizon.cli:main",
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
    ],
)

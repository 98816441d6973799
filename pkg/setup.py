#!/usr/bin/env python3
"""
Packaging for netbalance
"""

from pathlib import Path

from setuptools import find_packages, setup


def read_requirements():
    """Runtime requirements (everything above the Development block)"""
    requirements = []
    for line in Path(__file__).with_name("requirements.txt").read_text().splitlines():
        line = line.strip()
        if line.startswith("# Development"):
            break
        if line and not line.startswith("#"):
            requirements.append(line)
    return requirements


setup(
    name="netbalance",
    version="0.1.0",
    description="Incentive pricing for load balancing in cellular networks",
    long_description=Path(__file__).with_name("README.md").read_text(encoding="utf-8"),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    python_requires=">=3.10",
    install_requires=read_requirements(),
    extras_require={"dev": ["pytest==7.4.4"]},
    entry_points={"console_scripts": ["netbalance=netbalance.cli:main"]},
)

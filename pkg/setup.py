from setuptools import find_packages, setup

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(
    name="qentropy",
    version="0.1.0",
    description="Classical simulation and query accounting of a quantum Shannon entropy estimator.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    scripts=["bin/qentropy"],
    classifiers=[
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: Apache Software License",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.7",
    install_requires=[
        "numpy",
        "tqdm>=4.47.0",
        "scipy",
        "scikit-learn",
        "pandas",
        "wandb>=0.10.32",
    ],
)

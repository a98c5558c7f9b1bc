import os
from dotenv import load_dotenv

load_dotenv()


def _env_bool(name, default):
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in ('1', 'true', 'yes', 'on')


class Config:
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    # Where the CLI writes series/frames/report when --out is not given
    OUTPUT_DIR = os.getenv('OUTPUT_DIR', './runs')

    PORT = int(os.getenv('PORT', 5000))
    DEBUG = os.getenv('FLASK_ENV') == 'development'

    # Dense amplitude storage: 2^24 complex128 is 256 MB
    MAX_QUBITS = int(os.getenv('MAX_QUBITS', 24))
    UNITARY_MAX_QUBITS = int(os.getenv('UNITARY_MAX_QUBITS', 10))
    KINETIC_SELF_TEST_MAX_QUBITS = int(os.getenv('KINETIC_SELF_TEST_MAX_QUBITS', 6))

    # Largest |psi| allowed at either grid edge for a Gaussian packet
    BOUNDARY_TOLERANCE = float(os.getenv('BOUNDARY_TOLERANCE', 1e-6))

    INIT_FIDELITY_THRESHOLD = float(os.getenv('INIT_FIDELITY_THRESHOLD', 0.99))
    # Gaussian initializer stays above the threshold up to 5 qubits; 8-qubit packets top out near 0.95
    CIRCUIT_INIT_MAX_QUBITS = int(os.getenv('CIRCUIT_INIT_MAX_QUBITS', 5))
    FIT_MAX_SWEEPS = int(os.getenv('FIT_MAX_SWEEPS', 500))
    FIT_TOLERANCE = float(os.getenv('FIT_TOLERANCE', 1e-10))

    # Max observable deviation accepted by `compare` before exiting with code 2
    COMPARE_TOLERANCE = float(os.getenv('COMPARE_TOLERANCE', 1e-10))

    MAX_WORKERS = int(os.getenv('MAX_WORKERS', 1))

    CACHE_ENABLED = _env_bool('CACHE_ENABLED', True)
    REDIS_HOST = os.getenv('REDIS_HOST', '127.0.0.1')
    REDIS_PORT = int(os.getenv('REDIS_PORT', 6379))
    REDIS_DB = int(os.getenv('REDIS_DB', 0))
    # Cached run results expire after one hour by default
    RESULT_CACHE_TTL = int(os.getenv('RESULT_CACHE_TTL', 3600))

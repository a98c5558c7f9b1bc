from flask import Flask, request, jsonify, Response, Blueprint
from flask_cors import CORS
import os
import logging
from config import Config
from cache_service import get_cache
from errors import EmulatorError
from harness import CLASSICAL, QUANTUM, build_readout_circuit, compare_runs, run_classical_path, run_quantum_path
from qasm_io import export_qasm
from scenarios import PRESETS, load_scenario

# Configure logging
logging.basicConfig(
    level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

app = Flask(__name__)

# All routes live under /qmd so the service can sit behind a path-routing proxy
api_bp = Blueprint('api', __name__, url_prefix='/qmd')


def get_allowed_origins():
    """Get the list of allowed CORS origins."""
    origins = [
        "http://localhost",
        "http://localhost:3000",
        "http://127.0.0.1:3000",
        "http://localhost:5000",
        "http://127.0.0.1:5000",
    ]

    # Add any additional origins from environment variable
    env_origins = os.environ.get('ADDITIONAL_CORS_ORIGINS', '')
    if env_origins:
        origins.extend(origin.strip() for origin in env_origins.split(',') if origin.strip())

    logger.info(f"CORS allowed origins: {origins}")
    return origins


CORS(app,
    resources={
        r"/*": {
            "origins": get_allowed_origins(),
            "methods": ["GET", "POST", "OPTIONS"],
            "allow_headers": ["Accept", "Content-Type", "Origin", "X-Requested-With"],
            "max_age": 3600
        }
    }
)


@app.errorhandler(EmulatorError)
def handle_emulator_error(e):
    logger.warning(f"Rejected request: {e}")
    return jsonify({'error': str(e), 'field': getattr(e, 'field', None)}), 400


def _scenario_from_body(data):
    """Body is a scenario document (optionally {"preset": ..., overrides}); file paths are not accepted"""
    if not isinstance(data, dict):
        return None
    doc = {k: v for k, v in data.items() if k not in ('path', 'tolerance')}
    return load_scenario(doc)


@api_bp.route('/api/health', methods=['GET'])
def health_check():
    """Health check endpoint"""
    return jsonify({
        'status': 'healthy',
        'presets': len(PRESETS),
        'cache_enabled': get_cache().enabled,
        'max_qubits': Config.MAX_QUBITS,
        'version': '1.0.0'
    })


@api_bp.route('/api/presets', methods=['GET'])
def list_presets():
    """List the preset scenarios with their derived quantities"""
    return jsonify([load_scenario(name).describe() for name in PRESETS])


@api_bp.route('/api/presets/<name>', methods=['GET'])
def get_preset(name):
    if name not in PRESETS:
        return jsonify({'error': f"Unknown preset '{name}'"}), 404
    config = load_scenario(name)
    return jsonify({'scenario': config.describe(), 'document': config.to_document()})


@api_bp.route('/api/run', methods=['POST'])
def run_scenario():
    """Run one path; results are cached by scenario fingerprint"""
    data = request.get_json(silent=True)
    config = _scenario_from_body(data)
    if config is None:
        return jsonify({'error': 'Request body must be a JSON object'}), 400
    path = data.get('path', QUANTUM)
    if path not in (QUANTUM, CLASSICAL):
        return jsonify({'error': f"path must be '{QUANTUM}' or '{CLASSICAL}'", 'field': 'path'}), 400

    cache = get_cache()
    fingerprint = config.fingerprint()
    payload = cache.get_run(path, fingerprint)
    if payload is None:
        result = run_quantum_path(config) if path == QUANTUM else run_classical_path(config)
        payload = result.to_dict()
        cache.put_run(path, fingerprint, payload)
    else:
        logger.debug(f"Serving cached {path} run of '{config.name}'")
    return jsonify(payload)


@api_bp.route('/api/compare', methods=['POST'])
def compare_scenario_endpoint():
    """Run both paths and report deviations; 'passed' uses the body's tolerance or COMPARE_TOLERANCE"""
    data = request.get_json(silent=True)
    config = _scenario_from_body(data)
    if config is None:
        return jsonify({'error': 'Request body must be a JSON object'}), 400
    tolerance = data.get('tolerance', Config.COMPARE_TOLERANCE)
    if isinstance(tolerance, bool) or not isinstance(tolerance, (int, float)) or tolerance <= 0:
        return jsonify({'error': 'tolerance must be a positive number', 'field': 'tolerance'}), 400

    cache = get_cache()
    fingerprint = config.fingerprint()
    payload = cache.get_comparison(fingerprint)
    if payload is None:
        report = compare_runs(run_quantum_path(config), run_classical_path(config))
        payload = report.to_dict()
        cache.put_comparison(fingerprint, payload)

    return jsonify({**payload, 'tolerance': tolerance, 'passed': payload['max_overall'] < tolerance})


@api_bp.route('/api/qasm/<name>', methods=['GET'])
def qasm_endpoint(name):
    """OpenQASM 2.0 text of the read-out circuit for step ?step=j of a preset"""
    if name not in PRESETS:
        return jsonify({'error': f"Unknown preset '{name}'"}), 404
    config = load_scenario(name)
    step = request.args.get('step', type=int)
    if step is None or not 0 <= step <= config.n_steps:
        return jsonify({'error': f"step must be an integer in [0, {config.n_steps}]", 'field': 'step'}), 400
    text = export_qasm(build_readout_circuit(config, step))
    return Response(text, mimetype='text/plain')


@api_bp.route('/api/cache/stats', methods=['GET'])
def cache_stats():
    return jsonify(get_cache().get_stats())


@api_bp.route('/api/cache/invalidate', methods=['POST'])
def invalidate_cached_scenario():
    """Drop the cached runs and comparison of the scenario in the body"""
    config = _scenario_from_body(request.get_json(silent=True))
    if config is None:
        return jsonify({'error': 'Request body must be a JSON object'}), 400
    fingerprint = config.fingerprint()
    deleted = get_cache().invalidate_scenario(fingerprint)
    return jsonify({'success': True, 'fingerprint': fingerprint, 'deleted': deleted})


@api_bp.route('/api/cache/clear', methods=['POST'])
def clear_cache():
    """Drop all cached results"""
    cache = get_cache()
    deleted = cache.clear_results()
    return jsonify({'success': True, 'deleted': deleted, 'message': 'Cache cleared'})


# Register the blueprint
app.register_blueprint(api_bp)

if __name__ == '__main__':
    app.run(host='0.0.0.0', port=Config.PORT, debug=Config.DEBUG)

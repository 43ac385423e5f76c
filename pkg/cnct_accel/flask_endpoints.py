#!/usr/bin/env python3
"""
Optional HTTP endpoints wrapping the evaluation commands.
They are not started by the package entry point; use `create_app()` or
`run_server()` explicitly, or serve `wsgi:app` with gunicorn.
"""

from flask import Flask, jsonify, request
from dataclasses import asdict
from datetime import datetime, timezone
import os
import time

from .cli import FUNCTIONS, OutputRecord, accelerate_sums, evaluate_function, function_terms, run_dist_query
from .cnct import ToleranceSpec, cnct_table
from .utils import DomainError, check_memory_usage, stats, logger


app = Flask(__name__)


def _float_list(raw):
    if not raw:
        return []
    try:
        return [float(item) for item in raw.split(',') if item.strip()]
    except ValueError:
        raise DomainError(f"args must be comma-separated numbers, got {raw!r}")


def _optional(args, name, cast):
    value = args.get(name)
    if value is None:
        return None
    try:
        return cast(value)
    except ValueError:
        raise DomainError(f"{name} must be a valid {cast.__name__}, got {value!r}")


def tolerance_from_query(args):
    """Build a ToleranceSpec from query parameters, falling back to defaults."""
    overrides = {
        'rel_tol': _optional(args, 'tol', float),
        'max_order': _optional(args, 'max_order', int),
        'max_terms': _optional(args, 'max_terms', int),
    }
    return ToleranceSpec(**{key: value for key, value in overrides.items() if value is not None})


def _record_response(record):
    stats['successful_evaluations'] += 1
    if not record.converged:
        stats['non_converged'] += 1
    return jsonify(asdict(record)), 200


def _error_response(route, error, started):
    elapsed = time.time() - started
    stats['failed_evaluations'] += 1
    if isinstance(error, DomainError):
        logger.warning(f"{route} rejected after {elapsed:.3f}s: {error}")
        return jsonify({'error': str(error)}), 400
    logger.error(f"Error in {route} after {elapsed:.3f}s: {error}")
    return jsonify({'error': 'Internal server error'}), 500


@app.route('/eval/<function>', methods=['GET'])
def eval_route(function):
    route_start_time = time.time()
    stats['total_requests'] += 1
    try:
        args = _float_list(request.args.get('args'))
        scale = _optional(request.args, 'scale', float) or 1.0
        result = evaluate_function(function, args, tolerance_from_query(request.args), scale)
        elapsed = time.time() - route_start_time
        logger.info(f"eval {function} completed in {elapsed:.3f}s")
        return _record_response(OutputRecord.from_result(result))
    except Exception as e:
        return _error_response('eval_route', e, route_start_time)


@app.route('/table/<function>', methods=['GET'])
def table_route(function):
    route_start_time = time.time()
    stats['total_requests'] += 1
    try:
        args = _float_list(request.args.get('args'))
        orders = _optional(request.args, 'orders', int)
        orders = 12 if orders is None else orders
        if orders < 0:
            raise DomainError('orders must be nonnegative')
        scale = _optional(request.args, 'scale', float) or 1.0
        oracle = function_terms(function, args, scale)
        rows = cnct_table(oracle, orders, tolerance_from_query(request.args))
        elapsed = time.time() - route_start_time
        logger.info(f"table {function} with {len(rows)} rows completed in {elapsed:.3f}s")
        stats['successful_evaluations'] += 1
        return jsonify({
            'rows': [{'n': row.order, 'delta': row.delta, 'terms_used': row.terms_used} for row in rows],
            'complete': len(rows) == orders + 1
        }), 200
    except Exception as e:
        return _error_response('table_route', e, route_start_time)


@app.route('/dist/<query>', methods=['GET'])
def dist_route(query):
    route_start_time = time.time()
    stats['total_requests'] += 1
    try:
        params = [_optional(request.args, name, float) for name in ('z', 's', 'v')]
        if any(value is None for value in params):
            raise DomainError('missing z, s or v parameter')
        record = run_dist_query(query, *params,
                                k=_optional(request.args, 'k', int),
                                p=_optional(request.args, 'p', float),
                                r=_optional(request.args, 'r', int),
                                tol=tolerance_from_query(request.args))
        elapsed = time.time() - route_start_time
        logger.info(f"dist {query} completed in {elapsed:.3f}s")
        return _record_response(record)
    except Exception as e:
        return _error_response('dist_route', e, route_start_time)


@app.route('/accel', methods=['POST'])
def accel_route():
    route_start_time = time.time()
    stats['total_requests'] += 1
    try:
        data = request.get_json(silent=True)
        if not data or 'sums' not in data:
            raise DomainError('missing sums')
        method = data.get('method', 'delta')
        if method not in ('delta', 'epsilon'):
            raise DomainError(f"unknown method {method!r}")
        try:
            sums = [float(value) for value in data['sums']]
        except (TypeError, ValueError):
            raise DomainError('sums must be a list of numbers')
        if len(sums) < 3:
            raise DomainError(f"at least 3 partial sums are required, got {len(sums)}")
        record = accelerate_sums(sums, method)
        return _record_response(record)
    except Exception as e:
        return _error_response('accel_route', e, route_start_time)


@app.route('/health', methods=['GET'])
def health():
    return jsonify({'status': 'healthy', 'functions': sorted(FUNCTIONS)}), 200


@app.route('/stats', methods=['GET'])
def get_stats():
    route_start_time = time.time()
    memory_mb = check_memory_usage()
    result = jsonify({
        'service': 'cnct_accel',
        'timestamp': datetime.now(timezone.utc).isoformat(),
        'stats': stats,
        'memory_mb': round(memory_mb, 1),
        'endpoints': ['/eval/<function>', '/table/<function>', '/dist/<query>', '/accel']
    })
    elapsed = time.time() - route_start_time
    logger.debug(f"stats endpoint completed in {elapsed:.3f}s")
    return result, 200


def create_app():
    return app


def run_server():
    port = int(os.getenv('API_PORT', 3446))
    logger.info('Starting Flask endpoints on port %s', port)
    app.run(host='0.0.0.0', port=port, debug=False)

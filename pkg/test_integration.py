#!/usr/bin/env python3
"""
Integration test script for the cnct_accel HTTP endpoints
Tests:
- Evaluate built-in functions against closed forms
- Fetch a convergence table
- Query a Lerch distribution
- Accelerate posted partial sums
- Check error handling for bad requests

Run against a live server (gunicorn --config gunicorn.conf.py wsgi:app).
"""

import requests
import math
import os
import sys
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Allow command-line override for API_HOST
if len(sys.argv) > 1:
    API_HOST = sys.argv[1]
else:
    API_HOST = os.getenv('API_HOST', 'localhost')

API_PORT = os.getenv('API_PORT', '3446')
BASE_URL = f"http://{API_HOST}:{API_PORT}"


def get_json(path, params=None):
    """GET a route and return (status, body)"""
    try:
        response = requests.get(f"{BASE_URL}{path}", params=params, timeout=60)
        return response.status_code, response.json()
    except Exception as e:
        print(f"✗ Error requesting {path}: {e}")
        return None, None


def check_value(name, path, params, expected, rel):
    """Evaluate a route and compare its value against a reference"""
    status, body = get_json(path, params)
    if status != 200:
        print(f"✗ {name}: status {status} - {body}")
        return False

    value = body['value']
    if math.isclose(value, expected, rel_tol=rel):
        print(f"✓ {name}: {value!r} ({body['terms_used']} terms, order {body['order']})")
        return True
    print(f"✗ {name}: got {value!r}, expected {expected!r}")
    return False


def run_evaluation_tests():
    """Closed-form checks for the eval and dist routes"""
    test_cases = [
        ("zeta(2)", '/eval/zeta', {'args': '2'}, math.pi ** 2 / 6, 1e-14),
        ("zeta(4)", '/eval/zeta', {'args': '4'}, math.pi ** 4 / 90, 1e-14),
        ("hurwitz(2, 0.5)", '/eval/hurwitz', {'args': '2,0.5'}, math.pi ** 2 / 2, 1e-14),
        ("Li_3(0.99999)", '/eval/polylog', {'args': '3,0.99999'}, 1.20204045438733, 1e-13),
        ("Li_1(0.5)", '/eval/polylog', {'args': '1,0.5'}, math.log(2), 1e-13),
        ("Euler sum", '/eval/eulersum', {'tol': '1e-12'}, 17 * math.pi ** 4 / 360, 1e-12),
        ("Zipf pmf(0)", '/dist/pmf', {'z': 1, 's': 2, 'v': 1, 'k': 0}, 6 / math.pi ** 2, 1e-14),
        ("geometric mean", '/dist/mean', {'z': 0.5, 's': 0, 'v': 1}, 1.0, 1e-13),
    ]

    passed = 0
    for case in test_cases:
        if check_value(*case):
            passed += 1

    print(f"\nEvaluation tests: {passed}/{len(test_cases)} passed")
    return passed == len(test_cases)


def run_table_test():
    """Fetch the Li_3(0.99999)/10 convergence table"""
    status, body = get_json('/table/polylog', {'args': '3,0.99999', 'scale': 0.1, 'orders': 12})
    if status != 200:
        print(f"✗ table: status {status} - {body}")
        return False

    expected = {0: 0.133331333415539, 5: 0.120204045387208, 12: 0.120204045438733}
    rows = body['rows']
    all_match = body['complete'] and len(rows) == 13
    for order, value in expected.items():
        if order < len(rows) and math.isclose(rows[order]['delta'], value, rel_tol=1e-13):
            print(f"✓ row {order}: {rows[order]['delta']!r}")
        else:
            print(f"✗ row {order}: expected {value!r}")
            all_match = False
    return all_match


def run_accel_test():
    """Post partial sums of the alternating harmonic series"""
    sums = []
    total = 0.0
    for k in range(12):
        total += (-1) ** k / (k + 1)
        sums.append(total)

    try:
        response = requests.post(f"{BASE_URL}/accel", json={'sums': sums}, timeout=10)
    except Exception as e:
        print(f"✗ Error posting sums: {e}")
        return False

    if response.status_code != 200:
        print(f"✗ accel: status {response.status_code} - {response.text}")
        return False
    value = response.json()['value']
    if abs(value - math.log(2)) < 1e-10:
        print(f"✓ accel: {value!r}")
        return True
    print(f"✗ accel: got {value!r}, expected ln 2")
    return False


def run_error_tests():
    """Bad requests must be rejected with 400"""
    test_cases = [
        ("unknown function", '/eval/gamma', {'args': '2'}),
        ("zeta(1)", '/eval/zeta', {'args': '1'}),
        ("negative z distribution", '/dist/pmf', {'z': -0.5, 's': 2, 'v': 1, 'k': 0}),
        ("missing moment order", '/dist/moment', {'z': 1, 's': 4, 'v': 1}),
        ("negative orders", '/table/zeta', {'args': '2', 'orders': -1}),
    ]

    all_ok = True
    for name, path, params in test_cases:
        status, body = get_json(path, params)
        if status == 400:
            print(f"✓ {name}: rejected ({body.get('error')})")
        else:
            print(f"✗ {name}: expected 400, got {status}")
            all_ok = False
    return all_ok


def main():
    print("=" * 60)
    print(f"cnct_accel integration tests against {BASE_URL}")
    print("=" * 60)

    status, body = get_json('/health')
    if status != 200:
        print("✗ Service is not reachable")
        return False
    print(f"✓ Service healthy, functions: {', '.join(body['functions'])}")

    print("\n[1/4] Evaluating functions...")
    eval_success = run_evaluation_tests()

    print("\n[2/4] Fetching convergence table...")
    table_success = run_table_test()

    print("\n[3/4] Accelerating posted partial sums...")
    accel_success = run_accel_test()

    print("\n[4/4] Checking error handling...")
    error_success = run_error_tests()

    overall_success = eval_success and table_success and accel_success and error_success

    print("\n" + "=" * 60)
    if overall_success:
        print("✅ All integration tests passed!")
    else:
        print("❌ Some integration tests failed.")
    print("=" * 60)

    return overall_success


if __name__ == "__main__":
    sys.exit(0 if main() else 1)

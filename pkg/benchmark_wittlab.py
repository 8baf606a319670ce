"""
Benchmark Suite for wittlab
Times structure polynomials, Witt batches, deformed exponentials and the
flagship kernel comparison over Z[i]/4.
"""
import time

import numpy as np

from src.ahseries import artin_hasse, ep_witt
from src.dualitylab import DualityInstance, lemma1_kernels, nl_hopf, theorem2_regression
from src.exactring import RingDescriptor, make_ring
from src.wittcore import KINDS, StructureCache, WittBatch, WittVector

FLAGSHIP = {"name": "flagship", "ring": "cyclotomic-quotient", "lift": "cyclotomic-lift",
            "p": "2", "l": "2", "lambda": "1 - zeta"}


def benchmark_structure_polynomials(depths=None):
    """Build every structure table from scratch and report term counts."""
    print("=" * 60)
    print("STRUCTURE POLYNOMIAL BENCHMARK")
    print("=" * 60)

    depths = depths or {2: 4, 3: 3}
    for p, depth in depths.items():
        cache = StructureCache()
        start_time = time.time()
        for kind in KINDS:
            table = cache.table(p, kind, depth)
            terms = [len(poly.terms()) for poly in table.polynomials]
            status = "✅" if table.is_integral() else "❌"
            print(f"  p={p} {kind:<10} depth {depth}: terms {terms} {status}")
        print(f"  p={p} built in {time.time() - start_time:.3f}s")
    print()


def benchmark_witt_batch():
    """Vectorised sums over every pair of W_3(Z/4) vectors against scalar sums."""
    print("=" * 60)
    print("WITT BATCH BENCHMARK")
    print("=" * 60)

    ring = make_ring(RingDescriptor.modular(4))
    batch = WittBatch(2, ring, 3)
    rng = np.random.default_rng(0)
    shuffled = [c[rng.permutation(batch.count)] for c in batch.columns]

    start_time = time.time()
    sums = batch.add(batch.columns, shuffled)
    batch_time = time.time() - start_time

    start_time = time.time()
    rows = range(0, batch.count, 8)
    agree = 0
    for row in rows:
        x = batch.vector(row)
        y = WittVector(2, ring, [batch.tables.elements[c[row]] for c in shuffled])
        if list((x + y).coords) == [batch.tables.elements[c[row]] for c in sums]:
            agree += 1
    scalar_time = time.time() - start_time

    print(f"Batch: {batch.count} sums in {batch_time:.4f}s")
    print(f"Scalar: {len(rows)} sums in {scalar_time:.4f}s")
    passed = agree == len(rows)
    print(f"Agreement: {agree}/{len(rows)} {'✅' if passed else '❌'}")
    print()
    return passed


def benchmark_series(order=12):
    """Artin-Hasse and a deformed exponential to the given order."""
    print("=" * 60)
    print("DEFORMED EXPONENTIAL BENCHMARK")
    print("=" * 60)

    start_time = time.time()
    series = artin_hasse(2, order)
    print(f"E_2(X) to order {order}: {len(series.coeffs)} terms in {time.time() - start_time:.3f}s")

    ring = make_ring(RingDescriptor.modular(4))
    v = WittVector(2, ring, [1, 3, 2, 1])
    start_time = time.time()
    series = ep_witt(v, 1, order)
    print(f"E_2(v, 1; X) over Z/4: {len(series.coeffs)} terms in {time.time() - start_time:.3f}s")
    print()


def benchmark_flagship():
    """Kernels on W_3 -> W_2 and the Hopf structure of N_2 over Z[i]/4."""
    print("=" * 60)
    print("FLAGSHIP BENCHMARK")
    print("=" * 60)

    instance = DualityInstance.from_mapping(FLAGSHIP)
    print(instance.summary())

    start_time = time.time()
    report = lemma1_kernels(instance, window=2)
    evidence = report.evidence
    print(f"Ker F^(mu): {evidence['kernel_f_mu']}, Ker F^(lam) T_a: {evidence['kernel_f_lambda_t_a']}")
    print(f"Inclusion: {evidence['inclusion']}, equal: {evidence['equal']}")
    print(f"Kernel comparison in {time.time() - start_time:.3f}s")

    hopf = nl_hopf(instance)
    index, steps = hopf.nilpotency()
    print(f"psi(X) = {hopf.psi.to_text(instance.ring)}")
    print(f"X nilpotent: {index is not None} (after {steps} powers)")
    print(f"Hopf axioms: {'✅' if all(hopf.axioms().values()) else '❌'}")
    print()
    return report.passed


def benchmark_char_p():
    print("=" * 60)
    print("CHARACTERISTIC p BENCHMARK")
    print("=" * 60)

    passed = True
    for case in ((2, 2, 1), (3, 1, 1), (2, 1, 0)):
        start_time = time.time()
        report = theorem2_regression(*case)
        passed &= report.passed
        print(f"  p={case[0]} l={case[1]} lambda={case[2]}: "
              f"{report.evidence['kernel_points']} kernel points, "
              f"{report.evidence['group_likes']} group-likes "
              f"{'✅' if report.passed else '❌'} ({time.time() - start_time:.3f}s)")
    print()
    return passed


if __name__ == "__main__":
    print("\n")
    print("╔" + "═" * 58 + "╗")
    print("║" + " " * 58 + "║")
    print("║  WITTLAB BENCHMARK SUITE".center(60) + "║")
    print("║  Witt vectors, deformed exponentials, Cartier duality".center(60) + "║")
    print("║" + " " * 58 + "║")
    print("╚" + "═" * 58 + "╝")
    print()

    results = []

    benchmark_structure_polynomials()
    results.append(("Witt batch agreement", benchmark_witt_batch()))
    benchmark_series()
    results.append(("Flagship kernels", benchmark_flagship()))
    results.append(("Characteristic p duality", benchmark_char_p()))

    print("=" * 60)
    print("SUMMARY")
    print("=" * 60)
    for name, passed in results:
        status = "✅ PASS" if passed else "❌ FAIL"
        print(f"{name}: {status}")

    all_passed = all(result[1] for result in results)
    print()
    if all_passed:
        print("🎉 ALL BENCHMARKS PASSED")
    else:
        print("⚠️  Some benchmarks failed - review results above")
    print()

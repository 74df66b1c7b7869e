"""Throughput measurements: field multiplication and the full pipeline.

Absolute times are machine-dependent; the stable observations are the
orderings (alpha-bounded costs more than strict at equal n and k; many
small encode operations cost more than fewer large ones) and the exact
multiplication counts, blocks * n^2.
"""

from ncss import bench
from ncss.codec import ALPHA_BOUNDED, STRICT

print("raw multiplication throughput (table lookups, vectorized):")
for row in bench.bench_mul([4, 8, 16], mul_count=2_000_000, reps=5, seed=0):
    print(f"  k={row.k:>2}: {row.median_ms:7.1f} ms median "
          f"-> {row.throughput / 1e6:6.1f} M muls/s")

size = 256 * 1024  # quarter-megabyte keeps the demo quick
print(f"\npipeline encode+plan+store, {size // 1024} KiB file, p=2:")
strict_rows = bench.bench_pipeline(
    file_bytes=size, n_list=[10, 50, 100], k_list=[8], mode=STRICT, p=2
)
for row in strict_rows:
    print(f"  strict    n={row.n:>3}: {row.median_ms:8.1f} ms, "
          f"{row.mul_count:>9} muls")

alpha_rows = bench.bench_pipeline(
    file_bytes=size, n_list=[100], k_list=[8],
    mode=ALPHA_BOUNDED, alpha=5.0, p=2,
)
for row in alpha_rows:
    print(f"  alpha=5   n={row.n:>3}: {row.median_ms:8.1f} ms, "
          f"{row.mul_count:>9} muls")

ratio = alpha_rows[0].median_ms / strict_rows[-1].median_ms
print(f"\nalpha-bounded / strict time at n=100: {ratio:.1f}x")

print("\nCSV form:")
print(bench.bench_csv(strict_rows + alpha_rows))

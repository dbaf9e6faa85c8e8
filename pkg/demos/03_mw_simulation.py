"""Max-weight scheduling in action: bounded backlogs inside the region,
linear blow-up outside it.

Max-weight gives each server to the queue with the largest
backlog * capacity product.  Inside the stability region the time-averaged
total backlog stays under an explicit bound driven by the membership
margin; outside, queues grow linearly at the rate of the violated
inequality's deficit.
"""

from mqms import (
    ArrivalModel,
    DiscreteChannelModel,
    build_region,
    delay_bound,
    membership_margin,
    run,
)

model = DiscreteChannelModel.bernoulli([[0.5, 0.5], [0.5, 0.5]])
region = build_region(model)
print("region:", [(a, round(b, 3)) for a, b in region.inequalities])

T, reps = 100_000, 5

for lam in ([0.65, 0.65], [0.85, 0.85]):
    arrivals = ArrivalModel.bernoulli_batch([1, 1], lam)
    delta = membership_margin(region, lam)
    print(f"\narrival rates {lam}: margin {delta:+.3f} ({region.verdict(lam)})")
    if delta > 0:
        bound = delay_bound(model.N, arrivals.a_max_sq, model.M, model.K, delta)
        print(f"  guaranteed time-avg total backlog <= {bound:.1f}")
    result = run(model, arrivals, policy="mw", T=T, seed=7, replications=reps)
    for s in result.replications:
        print(
            f"  rep {s.replication}: avg backlog {s.avg_aggregate_occupancy:8.2f}, "
            f"throughput {[round(x, 3) for x in s.throughput]}, "
            f"final queues {s.final_queue}"
        )
    if delta < 0:
        expected_slope = -delta * 2  # deficit accumulates across both queues
        print(f"  (expected growth ~{expected_slope:.2f} packets/slot "
              f"=> ~{expected_slope * T:.0f} after {T} slots)")

"""Online K-Means over pixel observations.

When observations are images there is no integer state id to count
terminal visits under, so the diversity estimators operate on cluster
indices instead: every successful skill rollout hands its terminal
observation to an OnlineKMeans, gets back a cluster index, and the
pool's DiversityCounts are keyed by that index.

The clusterer keeps the M most recent terminal observations (with the
skill that produced them) in a bounded buffer.  A new observation that
lands farther from its assigned centroid than every other buffered
member of that cluster signals that the centroids have gone stale: the
buffer is re-clustered with Lloyd's iterations, every buffered item is
relabeled, and the owning pool rebuilds its count table from the
relabeled records.
"""

import numpy as np

BUFFER_SIZE = 512
LLOYD_TOL = 1e-6
LLOYD_MAX_ITERS = 100


class OnlineKMeans:
    """Streaming k-means with a bounded relabel buffer.

    Centroids are seeded by the first k distinct vectors observed (no
    randomness, for reproducibility).  Distances are plain Euclidean on
    flattened raw intensities.

    :param k: number of clusters (the owning pool's skill count)
    :param buffer_size: bounded count of retained (vector, skill) records
    """

    def __init__(self, k, buffer_size=BUFFER_SIZE):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.k = k
        self.buffer_size = buffer_size
        self.centroids = []  # grows up to k during seeding
        self.buffer = []  # entries [vector, skill z, assigned index, distance]
        self.refits = 0

    def _distances(self, v):
        c = np.asarray(self.centroids, dtype=np.float64)
        return np.sqrt(((c - v) ** 2).sum(axis=1))

    def assign(self, v):
        """Nearest-centroid index; ties resolve to the lowest index."""
        if not self.centroids:
            raise ValueError("no centroids yet (no observations seen)")
        d = self._distances(np.asarray(v, dtype=np.float64))
        return int(np.argmin(d))

    def observe(self, v, z):
        """Record a terminal observation from skill z.

        :returns: (cluster index, refit_occurred)
        """
        v = np.asarray(v, dtype=np.float64)
        if len(self.centroids) < self.k:
            known = any(np.array_equal(v, c) for c in self.centroids)
            if not known:
                self.centroids.append(v.copy())
        idx = self.assign(v)
        dist = float(self._distances(v)[idx])
        self.buffer.append([v.copy(), z, idx, dist])
        if len(self.buffer) > self.buffer_size:
            self.buffer.pop(0)
        refit = False
        peers = [e[3] for e in self.buffer[:-1] if e[2] == idx]
        if peers and dist > max(peers):
            self._refit()
            refit = True
            idx = self.buffer[-1][2]
        return idx, refit

    def _refit(self):
        """Lloyd's iterations to convergence on the buffer, then relabel."""
        vs = np.stack([e[0] for e in self.buffer])
        k = len(self.centroids)
        centers = np.stack(self.centroids)
        prev_wcss = None
        for _ in range(LLOYD_MAX_ITERS):
            d2 = ((vs[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            labels = np.argmin(d2, axis=1)
            wcss = float(d2[np.arange(len(vs)), labels].sum())
            if prev_wcss is not None:
                if prev_wcss > 0 and (prev_wcss - wcss) / prev_wcss < LLOYD_TOL:
                    break
                if wcss == 0.0:
                    break
                assert wcss <= prev_wcss + 1e-9, "Lloyd iteration increased WCSS"
            prev_wcss = wcss
            for j in range(k):
                members = vs[labels == j]
                if len(members):
                    centers[j] = members.mean(axis=0)
        self.centroids = [centers[j].copy() for j in range(k)]
        d2 = ((vs[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1)
        dists = np.sqrt(d2[np.arange(len(vs)), labels])
        for e, lab, dist in zip(self.buffer, labels, dists):
            e[2] = int(lab)
            e[3] = float(dist)
        self.refits += 1

    def records(self):
        """Buffered (cluster index, skill z) pairs under current labels."""
        return [(e[2], e[1]) for e in self.buffer]


def relabel_counts(km, counts):
    """Rebuild a DiversityCounts table from the relabeled buffer.

    Total count mass over buffered records is preserved; keys move to
    the item's current cluster index.
    """
    counts.rebuild(km.records())
    return counts

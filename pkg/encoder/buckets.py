import math

NUM_BUCKETS = 9


def width_bucket(width: int) -> int:
    """Bucket ids for [1], [2], [3], [4], [5-7], [8-15], [16-31], [32-63], [64+]."""
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    if width <= 4:
        return width - 1
    return min(int(math.floor(math.log2(width))) + 2, NUM_BUCKETS - 1)


def distance_bucket(distance: int) -> int:
    """Same scheme as width_bucket, over mention distance (adjacent = 1)."""
    return width_bucket(distance)

"""The six emotion categories and their fixed index order.

Index order is load-bearing: vote tuples, matrix rows/columns, and report
indices all follow it.
"""

EMOTIONS = ("love", "fear", "joy", "sadness", "surprise", "anger")
NUM_EMOTIONS = len(EMOTIONS)


def emotion_name(index: int) -> str:
    return EMOTIONS[index]


def emotion_index(name: str) -> int:
    return EMOTIONS.index(name)

import pytest
from hypothesis import given, settings, strategies as st

from plotkit.geometry import Box
from plotkit.linking import DIRECTIONS, OPPOSITE, find_neighbors
from plotkit.targets import (
    Annotation, ObjectClass, OverlappingAnnotationsError, ProposalTargets,
    assign_class, assign_link_targets, assign_regression_target,
    assign_targets,
)


def ann(i, cls, box, text=None):
    return Annotation(i, cls, box, text)


BAR = ann(0, ObjectClass.BAR, Box(100, 50, 140, 300))
TITLE = ann(1, ObjectClass.PLOT_TITLE, Box(50, 10, 600, 40), "SOME TITLE")
TICK = ann(2, ObjectClass.X_AXIS_TICKS, Box(100, 320, 140, 335), "AAA")
ANNS = [BAR, TITLE, TICK]


def test_class_list_has_ten_variants():
    assert len(ObjectClass) == 10
    assert ObjectClass.BACKGROUND in ObjectClass


def test_assign_class_inside_bar():
    cls, parent = assign_class(Box(110, 100, 130, 200), ANNS)
    assert cls is ObjectClass.BAR and parent == 0


def test_assign_class_background():
    cls, parent = assign_class(Box(300, 400, 350, 450), ANNS)
    assert cls is ObjectClass.BACKGROUND and parent is None


def test_assign_class_half_open_edges():
    # proposal centered exactly on the parent's inclusive edge -> inside
    gt = [ann(0, ObjectClass.BAR, Box(10, 10, 20, 20))]
    on_min_edge = Box(5, 5, 15, 15)      # center (10, 10) == (x0, y0)
    assert assign_class(on_min_edge, gt)[0] is ObjectClass.BAR
    on_max_edge = Box(15, 15, 25, 25)    # center (20, 20) == (x1, y1)
    assert assign_class(on_max_edge, gt)[0] is ObjectClass.BACKGROUND


def test_assign_class_rejects_overlapping_annotations():
    bad = [ann(0, ObjectClass.BAR, Box(0, 0, 50, 50)),
           ann(1, ObjectClass.BAR, Box(25, 25, 75, 75))]
    with pytest.raises(OverlappingAnnotationsError):
        assign_class(Box(0, 0, 10, 10), bad)


def test_regression_target_visual_passthrough():
    prop = Box(105, 60, 135, 280)
    assert assign_regression_target(prop, BAR) == BAR.box


def test_regression_target_textual_clips_horizontally():
    word = Box(200, 15, 260, 35)
    assert assign_regression_target(word, TITLE) == Box(200, 10, 260, 40)


def test_regression_target_identity_when_matching():
    assert assign_regression_target(TICK.box, TICK) == TICK.box


def test_regression_target_y_axis_label_transposed():
    ylab = ann(5, ObjectClass.Y_AXIS_LABEL, Box(10, 100, 26, 300))
    word = Box(12, 120, 24, 180)
    assert assign_regression_target(word, ylab) == Box(10, 120, 26, 180)


def test_link_targets_same_parent_words():
    words = [Box(0, 0, 30, 14), Box(40, 0, 70, 14)]
    parents = [1, 1]
    idx = find_neighbors(words, 50)
    links = assign_link_targets(words, parents, idx)
    assert links[0].right and not links[0].left
    assert links[1].left and not links[1].right


def test_link_targets_different_parents_all_false():
    words = [Box(0, 0, 30, 14), Box(40, 0, 70, 14)]
    idx = find_neighbors(words, 50)
    links = assign_link_targets(words, [1, 2], idx)
    assert not links[0].any() and not links[1].any()


def test_link_targets_background_all_false():
    words = [Box(0, 0, 30, 14), Box(40, 0, 70, 14)]
    idx = find_neighbors(words, 50)
    links = assign_link_targets(words, [None, 3], idx)
    assert not links[0].any() and not links[1].any()


def test_link_target_symmetry_for_mutual_neighbors():
    words = [Box(0, 0, 30, 14), Box(40, 0, 70, 14), Box(80, 0, 110, 14)]
    parents = [7, 7, 7]
    idx = find_neighbors(words, 50)
    links = assign_link_targets(words, parents, idx)
    for i in range(len(words)):
        for d in DIRECTIONS:
            j = idx.get(i, d)
            if j is not None and idx.get(j, OPPOSITE[d]) == i:
                assert links[i].get(d) == links[j].get(OPPOSITE[d])


def test_background_never_carries_regression_box():
    with pytest.raises(ValueError):
        ProposalTargets(ObjectClass.BACKGROUND, Box(0, 0, 1, 1),
                        links=__import__("plotkit.linking", fromlist=["NO_LINKS"]).NO_LINKS)


def test_assign_targets_end_to_end():
    props = [Box(110, 100, 130, 200),   # inside the bar
             Box(200, 15, 260, 35),     # title word
             Box(300, 400, 350, 450)]   # background
    idx = find_neighbors(props, 50)
    recs = assign_targets(props, ANNS, idx)
    assert recs[0].cls is ObjectClass.BAR
    assert recs[0].regression_box == BAR.box
    assert recs[1].cls is ObjectClass.PLOT_TITLE
    assert recs[1].regression_box == Box(200, 10, 260, 40)
    assert recs[2].cls is ObjectClass.BACKGROUND
    assert recs[2].regression_box is None


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_assignment_matches_point_in_box_scan(data):
    """Brute-force oracle: scan every annotation for center containment."""
    anns = []
    x = 0
    for i in range(data.draw(st.integers(1, 5))):
        w = data.draw(st.integers(5, 30))
        h = data.draw(st.integers(5, 30))
        y = data.draw(st.integers(0, 60))
        anns.append(ann(i, ObjectClass.BAR, Box(x, y, x + w, y + h)))
        x += w + data.draw(st.integers(3, 12))
    px0 = data.draw(st.integers(0, x))
    py0 = data.draw(st.integers(0, 90))
    prop = Box(px0, py0, px0 + data.draw(st.integers(2, 25)),
               py0 + data.draw(st.integers(2, 25)))

    cls, parent = assign_class(prop, anns)
    cx, cy = prop.center
    hits = [a for a in anns if a.box.contains_point(cx, cy)]
    if hits:
        assert parent == hits[0].object_id and cls is hits[0].cls
        assert len(hits) == 1
    else:
        assert parent is None and cls is ObjectClass.BACKGROUND


def test_textual_target_extents_property():
    word = Box(210, 18, 240, 33)
    target = assign_regression_target(word, TITLE)
    assert (target.y0, target.y1) == (TITLE.box.y0, TITLE.box.y1)
    assert (target.x0, target.x1) == (word.x0, word.x1)

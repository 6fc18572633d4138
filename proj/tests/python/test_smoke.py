"""End-to-end smoke tests for the handgeom Python module."""

import math

import pytest

import handgeom as hg


@pytest.fixture(scope="module")
def right_hand():
    return hg.generate(hand_type="right", seed=11)


def test_generate_and_normalize(right_hand):
    img = right_hand.image
    assert img.width == 383 and img.height == 526
    norm = hg.normalize(img)
    assert norm.mask_width == hg.NORMALIZED_WIDTH
    assert norm.mask_height == hg.NORMALIZED_HEIGHT
    assert norm.hand_type == "right"
    assert len(norm.contour) > 100


def test_landmarks_and_features_match_truth(right_hand):
    norm = hg.normalize(right_hand.image)
    lm = hg.landmarks(norm)
    assert len(lm["tips"]) == 5
    assert len(lm["valleys"]) == 4
    assert len(lm["mirrored_valleys"]) == 3

    feats = hg.extract_features(norm)
    assert len(feats) == hg.FEATURE_COUNT
    truth = right_hand.truth.features
    assert max(abs(a - b) for a, b in zip(feats, truth)) <= 5.0

    again = hg.features_of_image(right_hand.image)
    assert feats == again


def test_enroll_identify_verify(tmp_path):
    images, _warn = hg.generate_population(
        3, 3, intra_noise=0.5, inter_gap=30.0, seed=5, canvas_width=256, canvas_height=352
    )
    db = hg.TemplateDB(2)
    probes = []
    for item in images:
        feats = hg.features_of_image(item.image)
        norm_hand = hg.normalize(item.image).hand_type
        if item.image_index < 2:
            db.add_row(item.subject_id, norm_hand, feats)
        else:
            probes.append((item.subject_id, norm_hand, feats))

    path = str(tmp_path / "db.txt")
    db.save(path)
    db = hg.TemplateDB.load(path)
    assert len(db) == 6

    for subject, hand, feats in probes:
        match = hg.identify(db, feats, hand, threshold=1e9)
        assert match.best_subject == subject
        check = hg.verify(db, subject, feats, hand, threshold=1e9)
        assert check.accept and check.score == pytest.approx(match.score)

    with pytest.raises(hg.PipelineError):
        hg.verify(db, "nobody", probes[0][2], probes[0][1], threshold=1.0)


def test_score_metrics():
    samples = [(0.5, True), (0.8, True), (4.0, False), (5.0, False)]
    far, frr = hg.rates_at(samples, 1.0)
    assert far == 0.0 and frr == 0.0
    threshold, rate = hg.eer(samples)
    assert rate == 0.0
    assert 0.5 <= threshold <= 5.0

    assert hg.row_distance([1.0] * 26, [2.0] * 26) == pytest.approx(26.0)
    assert hg.row_distance([0.0] * 26, [1.0] * 26, hg.DistanceKind.L2) == pytest.approx(
        math.sqrt(26.0)
    )


def test_pgm_roundtrip(tmp_path, right_hand):
    path = str(tmp_path / "hand.pgm")
    hg.save_pgm(right_hand.image, path)
    again = hg.load_pgm(path)
    assert again == right_hand.image

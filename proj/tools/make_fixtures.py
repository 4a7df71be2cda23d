#!/usr/bin/env python3
"""Regenerates the synthetic gripper fixtures and the shared unit-box mesh."""
import json
import math
import os

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def box_link(name, extents, center):
    return {"name": name, "mesh": "../meshes/unit_box.obj", "scale": list(extents),
            "origin": {"xyz": list(center)}}


def revolute(name, parent, child, xyz, axis, limits):
    return {"name": name, "type": "revolute", "parent": parent, "child": child,
            "origin": {"xyz": list(xyz)}, "axis": list(axis), "limits": list(limits)}


def write_unit_box():
    verts = [((i & 1) - 0.5, ((i >> 1) & 1) - 0.5, ((i >> 2) & 1) - 0.5) for i in range(8)]
    faces = [(0, 2, 1), (1, 2, 3), (4, 5, 6), (5, 7, 6), (0, 1, 4), (1, 5, 4),
             (2, 6, 3), (3, 6, 7), (0, 4, 2), (2, 4, 6), (1, 3, 5), (3, 7, 5)]
    with open(os.path.join(ROOT, "meshes", "unit_box.obj"), "w") as f:
        f.write("# unit cube centred at the origin\n")
        for v in verts:
            f.write("v %g %g %g\n" % v)
        for a, b, c in faces:
            f.write("f %d %d %d\n" % (a + 1, b + 1, c + 1))


def planar2():
    links = [box_link("palm", (0.12, 0.02, 0.02), (0, 0, 0))]
    joints, fingers, kps = [], [], []
    for k, (x, lim1, lim2) in enumerate([(-0.05, (-0.4, 0.4), (-0.6, 0.4)),
                                         (0.05, (-0.4, 0.4), (-0.4, 0.6))]):
        prox, dist = "f%d_prox" % k, "f%d_dist" % k
        links.append(box_link(prox, (0.012, 0.05, 0.012), (0, 0.025, 0)))
        links.append(box_link(dist, (0.012, 0.03, 0.012), (0, 0.015, 0)))
        joints.append(revolute("f%d_j1" % k, "palm", prox, (x, 0.01, 0), (0, 0, 1), lim1))
        joints.append(revolute("f%d_j2" % k, prox, dist, (0, 0.05, 0), (0, 0, 1), lim2))
        fingers.append([prox, dist])
        kps.append({"middle": {"link": prox, "offset": [0, 0.05, 0]},
                    "tip": {"link": dist, "offset": [0, 0.03, 0]}})
    return {"name": "planar2", "units": "m", "links": links, "joints": joints, "fingers": fingers,
            "keypoints": {"root": {"link": "palm", "offset": [0, 0, 0]}, "fingers": kps},
            "palm_frame": {"xyz": [0, 0.01, 0]}, "d_up": [0, 1, 0]}


def spatial_hand(name, palm, bases, phalanges, abd_limit, flex_limit):
    """Fingers rise along +z from the palm top and curl toward the palm centre.

    bases: list of (x, y) finger roots; the first entry is the thumb.
    phalanges: lengths after the knuckle; the middle keypoint sits at the end
    of the second-to-last phalanx.
    """
    top = palm[2] / 2
    links = [box_link("palm", palm, (0, 0, 0))]
    joints, fingers, kps = [], [], []
    for k, (x, y) in enumerate(bases):
        flex_axis = (0, 1, 0) if x < 0 else (0, -1, 0)
        knuckle = "f%d_base" % k
        links.append(box_link(knuckle, (0.016, 0.016, 0.012), (0, 0, 0.006)))
        joints.append(revolute("f%d_abd" % k, "palm", knuckle, (x, y, top), (1, 0, 0), abd_limit))
        chain = [knuckle]
        parent, z = knuckle, 0.012
        for i, length in enumerate(phalanges):
            link = "f%d_p%d" % (k, i)
            width = 0.014 - 0.001 * i
            links.append(box_link(link, (width, width, length), (0, 0, length / 2)))
            joints.append(revolute("f%d_j%d" % (k, i), parent, link, (0, 0, z), flex_axis, flex_limit))
            chain.append(link)
            parent, z = link, length
        fingers.append(chain)
        kps.append({"middle": {"link": chain[-2], "offset": [0, 0, phalanges[-2]]},
                    "tip": {"link": chain[-1], "offset": [0, 0, phalanges[-1]]}})
    return {"name": name, "units": "m", "links": links, "joints": joints, "fingers": fingers,
            "keypoints": {"root": {"link": "palm", "offset": [0, 0, 0]}, "fingers": kps},
            "palm_frame": {"xyz": [0, 0, top]}, "d_up": [0, 0, 1]}


def main():
    os.makedirs(os.path.join(ROOT, "meshes"), exist_ok=True)
    os.makedirs(os.path.join(ROOT, "grippers"), exist_ok=True)
    write_unit_box()
    hands = {
        "planar2": planar2(),
        "spatial3": spatial_hand("spatial3", (0.09, 0.07, 0.02), [(-0.035, 0.0), (0.035, 0.02), (0.035, -0.02)],
                                 [0.045, 0.035], (-0.3, 0.3), (0.0, 1.5)),
        "allegro4": spatial_hand("allegro4", (0.10, 0.11, 0.02),
                                 [(-0.04, -0.02), (0.04, 0.04), (0.04, 0.0), (0.04, -0.04)],
                                 [0.05, 0.035, 0.03], (-0.3, 0.3), (0.0, 1.4)),
        "shadow5": spatial_hand("shadow5", (0.10, 0.12, 0.02),
                                [(-0.04, -0.03), (0.04, 0.045), (0.04, 0.015), (0.04, -0.015), (0.04, -0.045)],
                                [0.045, 0.03], (-0.25, 0.25), (0.0, 1.5)),
    }
    for name, doc in hands.items():
        with open(os.path.join(ROOT, "grippers", name + ".json"), "w") as f:
            json.dump(doc, f, indent=2)
            f.write("\n")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Generate the neural-network workload descriptors used by `fenc workloads`.

Each descriptor lists, per layer, the number of weight bits that must be
decrypted when the layer is fed to the accelerator and the number of output
(activation) bits that are encrypted when the layer result is stored back.

Layer shapes follow the standard published architecture definitions:

  alexnet       torchvision AlexNet, 224x224 input
  mobilenet     MobileNet v1 (1.0, 224), depthwise separable stack
  resnet18      ResNet-18, 224x224 input, including 1x1 downsample convs
  googlenet     GoogLeNet / Inception v1 inception table, 224x224 input
  yolo_tiny     Tiny YOLO v2 (VOC, 125 output channels), 416x416 input
  fasterrcnn    Faster R-CNN with a VGG-16 backbone, 600x800 input,
                RPN with 9 anchors, 300 RoIs through the fc head (21 classes)

Only multiply-accumulate layers (conv / fc) carry weights. Biases, batch-norm
and pooling layers are not counted. All tensors use `--precision` bits per
element (8 by default).

Usage: python3 gen_workloads.py [--precision 8] [--out DIR]
"""

import argparse
import json
import os


def conv_out(size, k, stride, pad):
    return (size + 2 * pad - k) // stride + 1


class Net:
    def __init__(self, name, size, channels):
        self.name = name
        self.size = size
        self.channels = channels
        self.layers = []

    def conv(self, name, out_ch, k, stride=1, pad=None, groups=1, src=None):
        """Convolution. `src` overrides (size, channels) for branch inputs."""
        size, in_ch = src if src is not None else (self.size, self.channels)
        if pad is None:
            pad = k // 2
        out = conv_out(size, k, stride, pad)
        weights = k * k * (in_ch // groups) * out_ch
        self.layers.append((name, weights, out * out * out_ch))
        return out, out_ch

    def seq_conv(self, *args, **kwargs):
        self.size, self.channels = self.conv(*args, **kwargs)

    def pool(self, k, stride, pad=0, ceil=False):
        if ceil:
            self.size = -(-(self.size + 2 * pad - k) // stride) + 1
        else:
            self.size = conv_out(self.size, k, stride, pad)

    def fc(self, name, in_features, out_features, batch=1):
        self.layers.append((name, in_features * out_features, out_features * batch))
        self.channels = out_features


def alexnet():
    n = Net("alexnet", 224, 3)
    n.seq_conv("conv1", 64, 11, 4, 2)
    n.pool(3, 2)
    n.seq_conv("conv2", 192, 5, 1, 2)
    n.pool(3, 2)
    n.seq_conv("conv3", 384, 3)
    n.seq_conv("conv4", 256, 3)
    n.seq_conv("conv5", 256, 3)
    n.pool(3, 2)
    n.fc("fc6", 256 * 6 * 6, 4096)
    n.fc("fc7", 4096, 4096)
    n.fc("fc8", 4096, 1000)
    return n


def mobilenet():
    n = Net("mobilenet", 224, 3)
    n.seq_conv("conv1", 32, 3, 2)
    plan = [(64, 1), (128, 2), (128, 1), (256, 2), (256, 1), (512, 2)]
    plan += [(512, 1)] * 5 + [(1024, 2), (1024, 1)]
    for i, (out_ch, stride) in enumerate(plan, start=1):
        n.seq_conv(f"dw{i}", n.channels, 3, stride, groups=n.channels)
        n.seq_conv(f"pw{i}", out_ch, 1)
    n.fc("fc", 1024, 1000)
    return n


def resnet18():
    n = Net("resnet18", 224, 3)
    n.seq_conv("conv1", 64, 7, 2, 3)
    n.pool(3, 2, 1)
    for stage, out_ch in enumerate([64, 128, 256, 512], start=1):
        for block in range(2):
            stride = 2 if stage > 1 and block == 0 else 1
            src = (n.size, n.channels)
            tag = f"layer{stage}.{block}"
            n.seq_conv(f"{tag}.conv1", out_ch, 3, stride)
            n.seq_conv(f"{tag}.conv2", out_ch, 3)
            if src[1] != out_ch or stride != 1:
                n.conv(f"{tag}.downsample", out_ch, 1, stride, 0, src=src)
    n.fc("fc", 512, 1000)
    return n


def googlenet():
    n = Net("googlenet", 224, 3)
    n.seq_conv("conv1", 64, 7, 2, 3)
    n.pool(3, 2, ceil=True)
    n.seq_conv("conv2_reduce", 64, 1)
    n.seq_conv("conv2", 192, 3)
    n.pool(3, 2, ceil=True)
    table = [
        ("3a", 64, 96, 128, 16, 32, 32),
        ("3b", 128, 128, 192, 32, 96, 64),
        "pool",
        ("4a", 192, 96, 208, 16, 48, 64),
        ("4b", 160, 112, 224, 24, 64, 64),
        ("4c", 128, 128, 256, 24, 64, 64),
        ("4d", 112, 144, 288, 32, 64, 64),
        ("4e", 256, 160, 320, 32, 128, 128),
        "pool",
        ("5a", 256, 160, 320, 32, 128, 128),
        ("5b", 384, 192, 384, 48, 128, 128),
    ]
    for entry in table:
        if entry == "pool":
            n.pool(3, 2, ceil=True)
            continue
        tag, c1, c3r, c3, c5r, c5, pp = entry
        src = (n.size, n.channels)
        n.conv(f"inc{tag}.1x1", c1, 1, src=src)
        r3 = n.conv(f"inc{tag}.3x3_reduce", c3r, 1, src=src)
        n.conv(f"inc{tag}.3x3", c3, 3, src=r3)
        r5 = n.conv(f"inc{tag}.5x5_reduce", c5r, 1, src=src)
        n.conv(f"inc{tag}.5x5", c5, 5, src=r5)
        n.conv(f"inc{tag}.pool_proj", pp, 1, src=src)
        n.channels = c1 + c3 + c5 + pp
    n.fc("fc", 1024, 1000)
    return n


def yolo_tiny():
    n = Net("yolo_tiny", 416, 3)
    for i, out_ch in enumerate([16, 32, 64, 128, 256], start=1):
        n.seq_conv(f"conv{i}", out_ch, 3)
        n.pool(2, 2)
    n.seq_conv("conv6", 512, 3)
    n.seq_conv("conv7", 1024, 3)
    n.seq_conv("conv8", 1024, 3)
    n.seq_conv("conv9", 125, 1)
    return n


def fasterrcnn():
    n = Net("fasterrcnn", 600, 3)
    n.size = (600, 800)
    # VGG-16 feature extractor on a rectangular input: track h and w apart.
    h, w = 600, 800
    layers = []
    cfg = [64, 64, "M", 128, 128, "M", 256, 256, 256, "M", 512, 512, 512, "M", 512, 512, 512]
    in_ch = 3
    idx = 1
    for v in cfg:
        if v == "M":
            h, w = h // 2, w // 2
            continue
        layers.append((f"conv{idx}", 9 * in_ch * v, h * w * v))
        in_ch = v
        idx += 1
    anchors = 9
    layers.append(("rpn_conv", 9 * 512 * 512, h * w * 512))
    layers.append(("rpn_cls", 512 * 2 * anchors, h * w * 2 * anchors))
    layers.append(("rpn_bbox", 512 * 4 * anchors, h * w * 4 * anchors))
    rois = 300
    layers.append(("fc6", 512 * 7 * 7 * 4096, 4096 * rois))
    layers.append(("fc7", 4096 * 4096, 4096 * rois))
    layers.append(("cls_score", 4096 * 21, 21 * rois))
    layers.append(("bbox_pred", 4096 * 84, 84 * rois))
    n.layers = layers
    return n


NETS = [alexnet, mobilenet, fasterrcnn, googlenet, resnet18, yolo_tiny]


def descriptor(net, precision):
    return {
        "name": net.name,
        "precision_bits": precision,
        "layers": [
            {"name": name, "weight_bits": w * precision, "output_bits": o * precision}
            for name, w, o in net.layers
        ],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--precision", type=int, default=8)
    parser.add_argument("--out", default=os.path.dirname(os.path.abspath(__file__)))
    args = parser.parse_args()
    for build in NETS:
        net = build()
        desc = descriptor(net, args.precision)
        path = os.path.join(args.out, f"{net.name}.json")
        with open(path, "w") as f:
            json.dump(desc, f, indent=2)
            f.write("\n")
        weights = sum(l[1] for l in net.layers)
        outputs = sum(l[2] for l in net.layers)
        print(f"{net.name:12s} layers={len(net.layers):3d} weights={weights:>11d} outputs={outputs:>11d}")


if __name__ == "__main__":
    main()

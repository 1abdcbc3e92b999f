namespace polysurf {}
